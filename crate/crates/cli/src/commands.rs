use std::path::Path;

use anyhow::{bail, Context};
use border_rank::hwv::{hwv_basis, m2_degree20_polys, BasisConfig, HwvPoly};
use border_rank::ideal::{certify, isotypic_dimension, vanishing_kernel, CertifyConfig, KernelConfig, VanishingKernel};
use border_rank::numag::{
    complete_witness_set, membership, min_vanishing_degree, pseudo_witness, random_vector, refine_all, InterpolationMode, MonodromyConfig,
    Parametrization, PseudoWitnessSet, VarietySpec,
};
use border_rank::rep::kronecker;
use border_rank::rng;
use border_rank::scalar::PrimeField;
use border_rank::tensor::{matmul_tensor, random_integer_decomposition};
use serde_json::{json, Value};

use crate::args::*;
use crate::Outcome;

pub fn dispatch(cmd: &Command) -> anyhow::Result<Outcome> {
    match cmd {
        Command::Kron(a) => kron(a),
        Command::HwvBasis(a) => basis(a),
        Command::Vanish(a) => vanish(a),
        Command::Certify(a) => certify_cmd(a),
        Command::Nag(NagCommand::Degree(a)) => degree(a),
        Command::Nag(NagCommand::Member(a)) => member(a),
        Command::Nag(NagCommand::Mindeg(a)) => mindeg(a),
    }
}

fn exact(result: Value, primes: Vec<u64>, seed: Option<u64>) -> Outcome {
    Outcome { result, primes, seed, conclusive: true }
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Reports from this tool wrap their payload in `result`; accept either form.
fn payload(v: Value) -> Value {
    match v {
        Value::Object(mut m) if m.contains_key("result") && m.contains_key("command") => m.remove("result").unwrap_or(Value::Null),
        v => v,
    }
}

fn kron(a: &KronArgs) -> anyhow::Result<Outcome> {
    let Shapes { pi, mu, nu } = &a.shapes;
    let k = kronecker(pi, mu, nu)?;
    let [da, db, dc] = a.dims.map_or([pi.len(), mu.len(), nu.len()], |d| d.0);
    let module = isotypic_dimension(pi, mu, nu, da, db, dc)?;
    Ok(exact(json!({ "kronecker": k, "dims": [da, db, dc], "isotypic_dimension": module }), vec![], None))
}

fn basis(a: &BasisArgs) -> anyhow::Result<Outcome> {
    let field = PrimeField::new(a.prime)?;
    let cfg = BasisConfig { trials_per_element: a.trials, ..BasisConfig::default() };
    let Shapes { pi, mu, nu } = &a.shapes;
    let b = hwv_basis(pi, mu, nu, &field, &mut rng::stream(a.seed, rng::STREAM_PAIRS), &cfg)?;
    let complete = b.complete;
    Ok(Outcome { result: serde_json::to_value(&b)?, primes: vec![a.prime], seed: Some(a.seed), conclusive: complete })
}

fn polys_from(src: &PolySource) -> anyhow::Result<Vec<HwvPoly>> {
    if let Some(path) = &src.basis {
        let v = payload(read_json(path)?);
        let list = match v {
            Value::Object(mut m) => m.remove("polys").context("basis file has no \"polys\"")?,
            v => v,
        };
        return serde_json::from_value(list).context("reading polynomials");
    }
    if src.preset == Some(Preset::M2D20) {
        return Ok(m2_degree20_polys());
    }
    if src.pair.is_empty() {
        bail!("give --basis, --preset, or --pi/--mu/--nu with at least one --pair");
    }
    let (pi, mu, nu) = (src.pi.clone().unwrap(), src.mu.clone().unwrap(), src.nu.clone().unwrap());
    src.pair.iter().map(|Pair(t1, t2)| Ok(HwvPoly::new(pi.clone(), mu.clone(), nu.clone(), t1.clone(), t2.clone())?)).collect()
}

fn kernel_config(r: usize, primes: &[u64], seed: u64) -> KernelConfig {
    KernelConfig { primes: primes.to_vec(), ..KernelConfig::new(r, seed) }
}

fn vanish(a: &VanishArgs) -> anyhow::Result<Outcome> {
    let polys = polys_from(&a.polys)?;
    let cfg = KernelConfig { n_points: a.points, dims: a.dims.map(|d| d.0), ..kernel_config(a.r, &a.primes, a.seed) };
    let kernel = vanishing_kernel(&polys, &cfg)?;
    let consistent = kernel.consistent;
    Ok(Outcome { result: serde_json::to_value(&kernel)?, primes: a.primes.clone(), seed: Some(a.seed), conclusive: consistent })
}

fn certify_cmd(a: &CertifyArgs) -> anyhow::Result<Outcome> {
    let kernel: VanishingKernel = match (&a.kernel, a.preset) {
        (Some(path), _) => {
            let k: VanishingKernel = serde_json::from_value(payload(read_json(path)?)).context("reading the kernel")?;
            if let Some(r) = a.r.filter(|&r| r != k.r) {
                bail!("--r {r} does not match the kernel's r = {}", k.r);
            }
            k
        }
        (None, Some(Preset::M2D20)) => vanishing_kernel(&m2_degree20_polys(), &kernel_config(a.r.unwrap_or(6), &a.primes, a.seed))?,
        (None, None) => bail!("give --kernel or --preset"),
    };
    let (target, name) = match a.target {
        Target::Matmul(m, n, p) => (matmul_tensor(m, n, p), format!("M<{m},{n},{p}>")),
        Target::RandomRank(r) => {
            let bound = *a.primes.iter().min().context("at least one prime is required")? as i64;
            let w = random_integer_decomposition(kernel.dims, r, bound, &mut rng::stream(a.seed, rng::STREAM_TARGET));
            (w, format!("random rank-{r} tensor"))
        }
    };
    let cfg = CertifyConfig { primes: a.primes.clone(), checks: a.checks, ..CertifyConfig::new(a.seed) };
    let cert = certify(&kernel, &target, &name, &cfg)?;
    Ok(exact(serde_json::to_value(&cert)?, a.primes.clone(), Some(a.seed)))
}

fn witness(a: &WitnessArgs) -> anyhow::Result<(PseudoWitnessSet, Value, bool)> {
    let g = a.variety.spec()?;
    let mut pw = pseudo_witness(&g, a.seed)?;
    let cfg = MonodromyConfig { max_rounds: a.max_rounds, stable_rounds: a.stable_rounds };
    let report = complete_witness_set(&mut pw, &cfg, a.attempts)?;
    let passed = report.trace.passed();
    Ok((pw, serde_json::to_value(&report)?, passed))
}

fn summary(pw: &PseudoWitnessSet) -> Value {
    json!({
        "variety": pw.variety.label(),
        "degree": pw.degree(),
        "image_dim": pw.image_dim,
        "fiber_dim": pw.fiber_dim,
        "max_residual": pw.max_residual(),
    })
}

fn degree(a: &DegreeArgs) -> anyhow::Result<Outcome> {
    let (pw, report, passed) = witness(&a.witness)?;
    if let Some(path) = &a.archive {
        std::fs::write(path, serde_json::to_string(&pw)?).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut result = summary(&pw);
    result["completion"] = report;
    Ok(Outcome { result, primes: vec![], seed: Some(a.witness.seed), conclusive: passed })
}

fn member(a: &MemberArgs) -> anyhow::Result<Outcome> {
    let (mut pw, completion, passed) = match &a.load {
        Some(path) => {
            let mut pw: PseudoWitnessSet = serde_json::from_value(read_json(path)?).context("reading the witness set")?;
            refine_all(&mut pw)?;
            (pw, Value::Null, true)
        }
        None => witness(&a.witness)?,
    };
    let g = pw.variety.clone();
    let mut rng = rng::stream(a.witness.seed, rng::STREAM_TARGET);
    let point = match (&a.point, a.sample) {
        (Some(p), _) => p.0.clone(),
        (None, Some(Sample::On)) => g.eval(&random_vector(g.source_dim(), &mut rng)),
        (None, Some(Sample::Off)) => random_vector(g.ambient_dim(), &mut rng),
        (None, None) => bail!("give --point or --sample"),
    };
    let outcome = membership(&mut pw, &point)?;
    let decided = passed && outcome.is_member().is_some();
    let mut result = summary(&pw);
    result["completion"] = completion;
    result["point"] = serde_json::to_value(&point)?;
    result["membership"] = serde_json::to_value(&outcome)?;
    Ok(Outcome { result, primes: vec![], seed: Some(a.witness.seed), conclusive: decided })
}

fn mindeg(a: &MindegArgs) -> anyhow::Result<Outcome> {
    let g: VarietySpec = a.variety.spec()?;
    let mode: InterpolationMode = a.mode.map_or(if g.is_cone() { InterpolationMode::Homogeneous } else { InterpolationMode::Affine }, Into::into);
    let mut rng = rng::stream(a.seed, rng::STREAM_NUMAG);
    let n = g.source_dim();
    let mut sampler = || g.eval(&random_vector(n, &mut rng));
    let found = min_vanishing_degree(&mut sampler, g.ambient_dim(), a.dmax, mode, a.memory_mb.saturating_mul(1 << 20));
    let reliable = found.reports.iter().all(|r| r.reliable);
    let result = json!({ "variety": g.label(), "mode": mode, "min_degree": found.degree, "search": found });
    Ok(Outcome { result, primes: vec![], seed: Some(a.seed), conclusive: reliable })
}
