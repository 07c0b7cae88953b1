use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::RepError;

/// A permutation of `{0, ..., d-1}` stored by its images.
///
/// Serialized in one-line notation with 1-indexed images, e.g. `[2,1,3]` for
/// the transposition `(1 2)` in `S_3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Permutation((0..d).collect())
    }

    /// From 0-indexed images.
    pub fn from_images(images: Vec<usize>) -> Result<Self, RepError> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(RepError::NotAPermutation(images.iter().map(|x| x + 1).collect()));
            }
            seen[x] = true;
        }
        Ok(Permutation(images))
    }

    /// From 1-indexed one-line notation.
    pub fn from_one_line(images: &[usize]) -> Result<Self, RepError> {
        if images.contains(&0) {
            return Err(RepError::NotAPermutation(images.to_vec()));
        }
        Self::from_images(images.iter().map(|x| x - 1).collect())
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.0.iter().map(|x| x + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }

    /// `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn random(d: usize, rng: &mut dyn RngCore) -> Self {
        let mut v: Vec<usize> = (0..d).collect();
        v.shuffle(rng);
        Permutation(v)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Sign via cycle decomposition.
    pub fn sign(&self) -> i64 {
        let mut seen = vec![false; self.0.len()];
        let mut sign = 1;
        for s in 0..self.0.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = RepError;
    fn try_from(v: Vec<usize>) -> Result<Self, RepError> {
        Permutation::from_one_line(&v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.one_line()
    }
}

impl FromStr for Permutation {
    type Err = RepError;

    /// Parses 1-indexed one-line notation `"10,15,5,..."`.
    fn from_str(s: &str) -> Result<Self, RepError> {
        let v = s
            .trim_matches(|c| c == '(' || c == ')' || c == '[' || c == ']')
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| RepError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Permutation::from_one_line(&v)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.one_line().iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_line_round_trip_and_inverse() {
        let p: Permutation = "(3, 1, 2)".parse().unwrap();
        assert_eq!(p.apply(0), 2);
        assert_eq!(p.inverse().compose(&p), Permutation::identity(3));
        assert_eq!(serde_json::to_string(&p).unwrap(), "[3,1,2]");
        assert!(Permutation::from_one_line(&[1, 1, 2]).is_err());
        assert!(Permutation::from_one_line(&[0, 1]).is_err());
        assert_eq!(p.sign(), 1);
        assert_eq!(Permutation::from_one_line(&[2, 1, 3]).unwrap().sign(), -1);
    }
}
