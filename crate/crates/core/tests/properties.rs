use border_rank::hwv::{build_plan, evaluate, evaluate_with, Engine, EvalConfig, HwvPoly};
use border_rank::rep::characters::{centralizer_order, factorial};
use border_rank::rep::{kronecker, random_pair_avoiding_zero_pattern, weyl_dim, Characters, Partition, Permutation};
use border_rank::scalar::{rank, Field, Matrix, PrimeField, Rationals, P31};
use border_rank::tensor::{expand, random_decomposition, Decomposition, RankOneTerm, Tensor3};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SMALL_SHAPES: [(&str, &str, &str); 7] = [
    ("2", "1,1", "1,1"),
    ("2,1", "2,1", "2,1"),
    ("3,1", "2,1,1", "2,2"),
    ("2,2", "2,2", "2,2"),
    ("3,2", "2,2,1", "3,1,1"),
    ("2,2,1", "2,2,1", "2,2,1"),
    ("4,1", "3,2", "3,1,1"),
];

fn part(s: &str) -> Partition {
    s.parse().unwrap()
}

fn random_poly(rng: &mut ChaCha8Rng, shapes: &[(&str, &str, &str)]) -> HwvPoly {
    let (a, b, c) = shapes[rng.gen_range(0..shapes.len())];
    let (pi, mu, nu) = (part(a), part(b), part(c));
    let (t1, t2) = random_pair_avoiding_zero_pattern(&pi, &mu, &nu, rng, 100_000).unwrap();
    HwvPoly::new(pi, mu, nu, t1, t2).unwrap()
}

fn dims_for(p: &HwvPoly, extra: usize) -> [usize; 3] {
    [p.pi.len() + extra, p.mu.len() + extra, p.nu.len() + extra]
}

/// Column groups of `pi`, shortest first, on consecutive slots; then moved by `tau`.
fn groups(pi: &Partition, tau: &Permutation) -> Vec<Vec<usize>> {
    let mut cols: Vec<usize> = pi.conjugate().parts().iter().map(|&c| c as usize).collect();
    cols.reverse();
    let mut next = 0;
    cols.iter()
        .map(|&len| {
            let g: Vec<usize> = (next..next + len).map(|s| tau.apply(s)).collect();
            next += len;
            g
        })
        .collect()
}

/// Every way to give each slot an index so each group reads as a permutation
/// of `0..g`, with the product of the signs.
fn signed_assignments(groups: &[Vec<usize>], d: usize) -> Vec<(Vec<usize>, i64)> {
    fn perms(n: usize) -> Vec<(Vec<usize>, i64)> {
        if n == 0 {
            return vec![(vec![], 1)];
        }
        let mut out = Vec::new();
        for (p, s) in perms(n - 1) {
            // insert n-1 at each position; each shift right past k entries flips sign k times
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                let flips = (p.len() - pos) as i64;
                out.push((q, if flips % 2 == 0 { s } else { -s }));
            }
        }
        out
    }
    let mut out = vec![(vec![usize::MAX; d], 1i64)];
    for g in groups {
        let mut next = Vec::new();
        for (assign, sign) in &out {
            for (p, s) in perms(g.len()) {
                let mut a = assign.clone();
                for (&slot, &idx) in g.iter().zip(&p) {
                    a[slot] = idx;
                }
                next.push((a, sign * s));
            }
        }
        out = next;
    }
    out
}

/// `P(T)` straight from the symmetrized tensor power, ignoring any decomposition.
fn brute_force(f: &PrimeField, p: &HwvPoly, t: &Tensor3<u64>) -> u64 {
    let d = p.degree();
    let a = signed_assignments(&groups(&p.pi, &Permutation::identity(d)), d);
    let b = signed_assignments(&groups(&p.mu, &p.tau1), d);
    let c = signed_assignments(&groups(&p.nu, &p.tau2), d);
    let mut total = 0;
    for (ia, sa) in &a {
        for (ib, sb) in &b {
            for (ic, sc) in &c {
                let mut term = f.from_i64(sa * sb * sc);
                for s in 0..d {
                    term = f.mul(&term, t.get(ia[s], ib[s], ic[s]));
                    if term == 0 {
                        break;
                    }
                }
                total = f.add(&total, &term);
            }
        }
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_symmetrization_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PrimeField::new(P31).unwrap();
        let p = random_poly(&mut rng, &SMALL_SHAPES);
        let w = random_decomposition(&f, dims_for(&p, rng.gen_range(0..2)), p.max_column_length() + rng.gen_range(0..3), &mut rng);
        prop_assert_eq!(evaluate(&f, &p, &w).unwrap(), brute_force(&f, &p, &expand(&f, &w)));
    }

    #[test]
    fn homogeneous_of_degree_d_on_each_side(seed in any::<u64>(), side in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PrimeField::new(P31).unwrap();
        let p = random_poly(&mut rng, &SMALL_SHAPES);
        let w = random_decomposition(&f, dims_for(&p, 0), p.max_column_length() + 1, &mut rng);
        let lambda = rng.gen_range(1..P31);
        let mut scaled = w.clone();
        for t in &mut scaled.terms {
            let v = match side { 0 => &mut t.u, 1 => &mut t.v, _ => &mut t.w };
            v.iter_mut().for_each(|x| *x = f.mul(x, &lambda));
        }
        let expected = f.mul(&f.pow(lambda, p.degree() as u64), &evaluate(&f, &p, &w).unwrap());
        prop_assert_eq!(evaluate(&f, &p, &scaled).unwrap(), expected);
    }

    #[test]
    fn zero_padding_is_invisible(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PrimeField::new(P31).unwrap();
        let p = random_poly(&mut rng, &SMALL_SHAPES);
        let w = random_decomposition(&f, dims_for(&p, 0), p.max_column_length() + 1, &mut rng);
        let pad = |v: &Vec<u64>| { let mut v = v.clone(); v.push(0); v };
        let padded = Decomposition::new(
            [w.dims[0] + 1, w.dims[1] + 1, w.dims[2] + 1],
            w.terms.iter().map(|t| RankOneTerm { u: pad(&t.u), v: pad(&t.v), w: pad(&t.w) }).collect(),
        ).unwrap();
        prop_assert_eq!(evaluate(&f, &p, &w).unwrap(), evaluate(&f, &p, &padded).unwrap());
    }

    #[test]
    fn depends_only_on_the_tensor(seed in any::<u64>()) {
        // split a term u(x)v(x)w into u(x)v(x)w1 + u(x)v(x)(w - w1) and shuffle, over Q
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = Rationals::default();
        let p = random_poly(&mut rng, &SMALL_SHAPES[..4]);
        let w = random_decomposition(&q, dims_for(&p, 0), p.max_column_length(), &mut rng);
        let mut other = w.clone();
        let t = other.terms.remove(0);
        let w1: Vec<_> = (0..t.w.len()).map(|_| q.sample(&mut rng)).collect();
        let rest: Vec<_> = t.w.iter().zip(&w1).map(|(a, b)| q.sub(a, b)).collect();
        other.terms.push(RankOneTerm { u: t.u.clone(), v: t.v.clone(), w: w1 });
        other.terms.insert(0, RankOneTerm { u: t.u, v: t.v, w: rest });
        prop_assert_eq!(expand(&q, &w), expand(&q, &other));
        prop_assert_eq!(evaluate(&q, &p, &w).unwrap(), evaluate(&q, &p, &other).unwrap());
    }

    #[test]
    fn zero_patterns_evaluate_to_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PrimeField::new(P31).unwrap();
        let (a, b, c) = SMALL_SHAPES[rng.gen_range(1..SMALL_SHAPES.len())];
        let (pi, mu, nu) = (part(a), part(b), part(c));
        let d = pi.weight();
        let p = loop {
            let p = HwvPoly::new(pi.clone(), mu.clone(), nu.clone(), Permutation::random(d, &mut rng), Permutation::random(d, &mut rng)).unwrap();
            if p.has_zero_pattern() {
                break p;
            }
        };
        let w = random_decomposition(&f, dims_for(&p, 1), p.max_column_length() + 2, &mut rng);
        prop_assert_eq!(evaluate(&f, &p, &w).unwrap(), 0);
    }

    #[test]
    fn search_and_frontier_engines_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PrimeField::new(P31).unwrap();
        let p = random_poly(&mut rng, &SMALL_SHAPES);
        let plan = build_plan(&p);
        let w = random_decomposition(&f, dims_for(&p, 1), p.max_column_length() + rng.gen_range(0..4), &mut rng);
        let run = |engine, parallel| evaluate_with(&f, &plan, &w, &EvalConfig { engine, parallel, ..EvalConfig::default() }).unwrap();
        let search = run(Engine::Search, false);
        prop_assert_eq!(search, run(Engine::Search, true));
        prop_assert_eq!(search, run(Engine::Frontier, false));
    }

    #[test]
    fn kronecker_symmetries(i in 0usize..11, j in 0usize..11, k in 0usize..11) {
        let all = Partition::all(6);
        let (pi, mu, nu) = (&all[i], &all[j], &all[k]);
        let base = kronecker(pi, mu, nu).unwrap();
        prop_assert_eq!(base, kronecker(mu, pi, nu).unwrap());
        prop_assert_eq!(base, kronecker(nu, mu, pi).unwrap());
        prop_assert_eq!(base, kronecker(pi, &mu.conjugate(), &nu.conjugate()).unwrap());
        let row = Partition::row(6);
        prop_assert_eq!(kronecker(&row, mu, nu).unwrap(), u64::from(mu == nu));
        prop_assert_eq!(kronecker(&row.conjugate(), mu, nu).unwrap(), u64::from(*mu == nu.conjugate()));
    }

    #[test]
    fn rank_matches_largest_nonzero_minor(seed in any::<u64>(), rows in 1usize..5, cols in 1usize..6) {
        let f = PrimeField::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // small entries, often rank deficient
        let m: Vec<Vec<u64>> = (0..rows).map(|_| (0..cols).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(1..7) }).collect()).collect();
        let r = rank(&f, &Matrix::from_rows(&m).unwrap()).unwrap();
        prop_assert_eq!(r, largest_nonzero_minor(&f, &m));
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n).flat_map(|last| subsets(last, k - 1).into_iter().map(move |mut s| { s.push(last); s })).collect()
}

fn leibniz(f: &PrimeField, m: &[Vec<u64>]) -> u64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n).fold(0, |acc, j| {
        let minor: Vec<Vec<u64>> = m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
        let term = f.mul(&m[0][j], &leibniz(f, &minor));
        if j % 2 == 0 { f.add(&acc, &term) } else { f.sub(&acc, &term) }
    })
}

fn largest_nonzero_minor(f: &PrimeField, m: &[Vec<u64>]) -> usize {
    let (rows, cols) = (m.len(), m[0].len());
    (1..=rows.min(cols))
        .rev()
        .find(|&k| {
            subsets(rows, k).iter().any(|rs| {
                subsets(cols, k).iter().any(|cs| leibniz(f, &rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect::<Vec<_>>()) != 0)
            })
        })
        .unwrap_or(0)
}

/// Semistandard tableaux of shape `pi` with entries in `1..=n`, by brute force.
fn ssyt_count(pi: &Partition, n: usize) -> u64 {
    let cells: Vec<(usize, usize)> = (0..pi.len()).flat_map(|r| (0..pi.part(r) as usize).map(move |c| (r, c))).collect();
    fn fill(cells: &[(usize, usize)], i: usize, grid: &mut Vec<Vec<usize>>, n: usize) -> u64 {
        if i == cells.len() {
            return 1;
        }
        let (r, c) = cells[i];
        let lo_row = if c > 0 { grid[r][c - 1] } else { 1 };
        let lo_col = if r > 0 { grid[r - 1][c] + 1 } else { 1 };
        let mut total = 0;
        for v in lo_row.max(lo_col)..=n {
            grid[r][c] = v;
            total += fill(cells, i + 1, grid, n);
        }
        grid[r][c] = 0;
        total
    }
    let mut grid: Vec<Vec<usize>> = (0..pi.len()).map(|r| vec![0; pi.part(r) as usize]).collect();
    fill(&cells, 0, &mut grid, n)
}

#[test]
fn weyl_dimension_counts_tableaux() {
    for d in 1..=6 {
        for pi in Partition::all(d) {
            for n in 1..=4 {
                match weyl_dim(&pi, n) {
                    Ok(w) => assert_eq!(w, ssyt_count(&pi, n), "{pi:?} n={n}"),
                    Err(_) => assert!(pi.len() > n),
                }
            }
        }
    }
}

#[test]
fn characters_are_orthonormal() {
    let mut chars = Characters::new();
    for d in [4u32, 7, 10, 12] {
        let parts = Partition::all(d);
        let n_fact = BigInt::from(factorial(d as usize));
        for a in &parts {
            for b in &parts {
                // sum over classes of chi_a chi_b |class| = d! [a == b]
                let mut total = BigInt::from(0);
                for mu in &parts {
                    let class = &n_fact / BigInt::from(centralizer_order(mu));
                    total += BigInt::from(chars.chi(a, mu).unwrap()) * BigInt::from(chars.chi(b, mu).unwrap()) * class;
                }
                let expected = if a == b { n_fact.clone() } else { BigInt::from(0) };
                assert_eq!(total, expected, "d={d} {a:?} {b:?}");
            }
        }
    }
}
