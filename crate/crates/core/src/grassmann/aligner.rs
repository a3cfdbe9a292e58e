//! Finite candidate sets of rational coordinate changes and the common
//! aligner search.

use serde::{Deserialize, Serialize};

use super::{graph_slope_valuation, Subspace};
use crate::error::{Error, Result};
use crate::field::{ExtendedValuation, FieldElement};
use crate::linalg::{is_gl_o, Matrix};

const SHIPPED_2: &str = include_str!("../../data/aligners_n2.json");
const SHIPPED_3: &str = include_str!("../../data/aligners_n3.json");
const SHIPPED_4: &str = include_str!("../../data/aligners_n4.json");

/// Rational `(cos, sin)` pairs from Pythagorean triples.
const ANGLES: [(i64, i64, i64); 5] = [(3, 4, 5), (4, 3, 5), (5, 12, 13), (12, 5, 13), (8, 15, 17)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignerSet {
    pub name: String,
    pub ambient_dim: usize,
    pub candidates: Vec<Matrix>,
}

impl AlignerSet {
    /// Parse and validate: every candidate must be rational, square of the
    /// right size and invertible (hence in GL_n(O)).
    pub fn from_json(src: &str) -> Result<Self> {
        let set: AlignerSet = serde_json::from_str(src)?;
        set.validate()?;
        Ok(set)
    }

    /// JSON with one candidate per line.
    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .candidates
            .iter()
            .map(|c| format!("    {}", serde_json::to_string(c).expect("serializable")))
            .collect();
        format!(
            "{{\n  \"name\": {},\n  \"ambient_dim\": {},\n  \"candidates\": [\n{}\n  ]\n}}",
            serde_json::to_string(&self.name).expect("serializable"),
            self.ambient_dim,
            rows.join(",\n")
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.candidates.iter().enumerate() {
            if c.rows() != self.ambient_dim || c.cols() != self.ambient_dim {
                return Err(Error::dims(format!("candidate {i} is not {0}x{0}", self.ambient_dim)));
            }
            if !c.entries().all(FieldElement::is_rational) {
                return Err(Error::invalid(format!("candidate {i} has non-rational entries")));
            }
            if !is_gl_o(c)? {
                return Err(Error::invalid(format!("candidate {i} is singular")));
            }
        }
        Ok(())
    }

    /// The bundled set for `n` in 2..=4.
    pub fn shipped(n: usize) -> Result<Self> {
        let src = match n {
            2 => SHIPPED_2,
            3 => SHIPPED_3,
            4 => SHIPPED_4,
            _ => return Err(Error::invalid(format!("no shipped aligner set for n = {n}"))),
        };
        Self::from_json(src)
    }

    /// Deterministic construction of the shipped sets: identity, coordinate
    /// permutations, single-plane rotations, then chained rotations
    /// through consecutive planes and through all planes.
    pub fn generate(n: usize) -> Self {
        let mut candidates = vec![Matrix::identity(n)];
        for perm in permutations(n).into_iter().skip(1) {
            let mut m = Matrix::zeros(n, n);
            for (i, &j) in perm.iter().enumerate() {
                m.set(i, j, FieldElement::one());
            }
            candidates.push(m);
        }
        for i in 0..n {
            for j in i + 1..n {
                for &(c, s, h) in &ANGLES {
                    for sign in [1, -1] {
                        candidates.push(plane_rotation(n, i, j, c, sign * s, h));
                    }
                }
            }
        }
        if n >= 3 {
            for shift in 0..ANGLES.len() {
                let chain = (0..n - 1).fold(Matrix::identity(n), |acc, k| {
                    let (c, s, h) = ANGLES[(shift + k) % ANGLES.len()];
                    &acc * &plane_rotation(n, k, k + 1, c, s, h)
                });
                let reverse = (0..n - 1).rev().fold(Matrix::identity(n), |acc, k| {
                    let (c, s, h) = ANGLES[(shift + k) % ANGLES.len()];
                    &acc * &plane_rotation(n, k, k + 1, c, -s, h)
                });
                candidates.push(chain);
                candidates.push(reverse);
            }
            // Products over every coordinate plane; these have no
            // vanishing minors in practice, which covers the remaining
            // coordinate configurations.
            let planes: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            for shift in 0..ANGLES.len() {
                let full = planes.iter().enumerate().fold(Matrix::identity(n), |acc, (k, &(i, j))| {
                    let (c, s, h) = ANGLES[(shift + k) % ANGLES.len()];
                    &acc * &plane_rotation(n, i, j, c, s, h)
                });
                candidates.push(full);
            }
        }
        AlignerSet {
            name: format!("rational-rotations-{n}"),
            ambient_dim: n,
            candidates,
        }
    }
}

fn plane_rotation(n: usize, i: usize, j: usize, c: i64, s: i64, h: i64) -> Matrix {
    let mut m = Matrix::identity(n);
    m.set(i, i, FieldElement::from_ratio(c, h));
    m.set(j, j, FieldElement::from_ratio(c, h));
    m.set(i, j, FieldElement::from_ratio(-s, h));
    m.set(j, i, FieldElement::from_ratio(s, h));
    m
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..rest.len() {
            let x = rest.remove(k);
            prefix.push(x);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(k, x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

/// The first candidate `κ` with `v(J(κV)) ≥ 0` for every given space.
pub fn find_aligner(spaces: &[Subspace], set: &AlignerSet) -> Result<Option<Matrix>> {
    if let Some(s) = spaces.iter().find(|s| s.ambient_dim() != set.ambient_dim) {
        return Err(Error::dims(format!(
            "subspace in {}-space, aligner set for {}-space",
            s.ambient_dim(),
            set.ambient_dim
        )));
    }
    for kappa in &set.candidates {
        let mut ok = true;
        for v in spaces {
            if graph_slope_valuation(&v.apply(kappa)?) < ExtendedValuation::Finite(0) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(kappa.clone()));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(s: &str) -> Subspace {
        s.parse().unwrap()
    }

    #[test]
    fn search_examples() {
        let only_id = AlignerSet {
            name: "id".into(),
            ambient_dim: 2,
            candidates: vec![Matrix::identity(2)],
        };
        assert_eq!(find_aligner(&[sp("span[(1,0)]")], &only_id).unwrap(), Some(Matrix::identity(2)));
        assert_eq!(find_aligner(&[sp("span[(t,1)]")], &only_id).unwrap(), None);

        let r = Matrix::from_strs(&[&["3/5", "-4/5"], &["4/5", "3/5"]]).unwrap();
        let with_r = AlignerSet {
            name: "id+r".into(),
            ambient_dim: 2,
            candidates: vec![Matrix::identity(2), r.clone()],
        };
        let spaces = [sp("span[(1,0)]"), sp("span[(0,1)]")];
        assert_eq!(find_aligner(&spaces, &with_r).unwrap(), Some(r));
    }

    #[test]
    fn shipped_sets_match_generator() {
        for n in 2..=4 {
            assert_eq!(AlignerSet::shipped(n).unwrap(), AlignerSet::generate(n), "n = {n}");
        }
    }

    #[test]
    fn shipped_sets_align_complementary_coordinate_pairs() {
        // A coordinate subspace and its orthogonal complement.
        let unit = |n: usize, i: usize| {
            let mut e = vec![FieldElement::zero(); n];
            e[i] = FieldElement::one();
            e
        };
        for n in 2..=4 {
            let set = AlignerSet::shipped(n).unwrap();
            for mask in 1u32..(1 << n) - 1 {
                let (inside, outside): (Vec<usize>, Vec<usize>) = (0..n).partition(|i| mask & (1 << i) != 0);
                let w = Subspace::span(n, &inside.iter().map(|&i| unit(n, i)).collect::<Vec<_>>()).unwrap();
                let c = Subspace::span(n, &outside.iter().map(|&i| unit(n, i)).collect::<Vec<_>>()).unwrap();
                assert!(find_aligner(&[w, c], &set).unwrap().is_some(), "n = {n}, mask = {mask:b}");
            }
        }
    }

    /// Rewrites the bundled JSON files: `cargo test -p valstrat -- --ignored regenerate`.
    #[test]
    #[ignore]
    fn regenerate_shipped_sets() {
        for n in 2..=4 {
            let path = format!("{}/data/aligners_n{n}.json", env!("CARGO_MANIFEST_DIR"));
            std::fs::write(path, AlignerSet::generate(n).to_json() + "\n").unwrap();
        }
    }

    #[test]
    fn rejects_singular_candidate() {
        let src = r#"{"name":"bad","ambient_dim":2,"candidates":[[["1","1"],["1","1"]]]}"#;
        assert!(AlignerSet::from_json(src).is_err());
        let src = r#"{"name":"bad","ambient_dim":2,"candidates":[[["t","0"],["0","1"]]]}"#;
        assert!(AlignerSet::from_json(src).is_err());
    }
}
