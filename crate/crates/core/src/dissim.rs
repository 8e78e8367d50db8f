//! Dissimilarity vectors: `d_2`, the classic `d_r`, the weighted `d_r^wt`,
//! and the linear map summing pair coordinates inside each `r`-subset.

use num_traits::Zero;
use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::combinat::{binomial, lex_rank, rank_sorted, subsets, subsets_of, RSubset};
use crate::error::{Error, Result};
use crate::linalg::left_inverse_matrix;
use crate::rational::{self, Rational};
use crate::tree::PhyloTree;

/// A value for every `r`-subset of `[n]`, stored in lex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetVector {
    n: usize,
    r: usize,
    values: Vec<Rational>,
}

impl SubsetVector {
    pub fn new(n: usize, r: usize, values: Vec<Rational>) -> Result<Self> {
        if r == 0 || r > n {
            return Err(Error::OutOfRange(format!(
                "subset vector needs 1 <= r <= n, got n={n}, r={r}"
            )));
        }
        if values.len() != binomial(n, r) {
            return Err(Error::Dimension(format!(
                "C({n},{r}) = {} entries expected, got {}",
                binomial(n, r),
                values.len()
            )));
        }
        Ok(SubsetVector { n, r, values })
    }

    pub fn zeros(n: usize, r: usize) -> Result<Self> {
        Self::new(n, r, vec![Rational::zero(); binomial(n, r)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    pub fn get(&self, s: &RSubset) -> Result<&Rational> {
        if s.len() != self.r {
            return Err(Error::InvalidSubset(format!(
                "{s} has size {}, vector indexed by {}-subsets",
                s.len(),
                self.r
            )));
        }
        Ok(&self.values[lex_rank(s, self.n)?])
    }

    /// Entry for a sorted, in-range slice (no checks beyond debug asserts).
    pub fn at(&self, sorted: &[usize]) -> &Rational {
        debug_assert_eq!(sorted.len(), self.r);
        &self.values[rank_sorted(sorted, self.n)]
    }

    pub fn set(&mut self, s: &RSubset, v: Rational) -> Result<()> {
        if s.len() != self.r {
            return Err(Error::InvalidSubset(format!(
                "{s} has size {}, vector indexed by {}-subsets",
                s.len(),
                self.r
            )));
        }
        let k = lex_rank(s, self.n)?;
        self.values[k] = v;
        Ok(())
    }

    /// `(subset, value)` pairs in lex order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &Rational)> {
        subsets(self.n, self.r).into_iter().zip(self.values.iter())
    }

    pub fn scale(&self, c: &Rational) -> SubsetVector {
        SubsetVector {
            n: self.n,
            r: self.r,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &SubsetVector) -> Result<SubsetVector> {
        if (self.n, self.r) != (other.n, other.r) {
            return Err(Error::Dimension(format!(
                "({},{}) + ({},{})",
                self.n, self.r, other.n, other.r
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SubsetVector {
            n: self.n,
            r: self.r,
            values,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("subset vectors always serialize")
    }

    /// Parse the canonical JSON form. Entry values are `"a"` / `"a/b"`
    /// strings or JSON integers; decimals only with `allow_decimal`.
    pub fn from_json(text: &str, allow_decimal: bool) -> Result<(SubsetVector, Option<String>)> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidVector(e.to_string()))?;
        Self::from_json_value(&v, allow_decimal)
    }

    pub fn from_json_value(
        v: &Value,
        allow_decimal: bool,
    ) -> Result<(SubsetVector, Option<String>)> {
        let field = |name: &str| {
            v.get(name)
                .ok_or_else(|| Error::InvalidVector(format!("missing field {name:?}")))
        };
        let as_size = |name: &str| -> Result<usize> {
            field(name)?.as_u64().map(|x| x as usize).ok_or_else(|| {
                Error::InvalidVector(format!("{name:?} must be a nonnegative integer"))
            })
        };
        let (n, r) = (as_size("n")?, as_size("r")?);
        if n > 64 || r == 0 || r > n {
            return Err(Error::OutOfRange(format!("vector file has n={n}, r={r}")));
        }
        let kind = v.get("kind").and_then(Value::as_str).map(str::to_string);
        let entries = field("entries")?
            .as_object()
            .ok_or_else(|| Error::InvalidVector("\"entries\" must be an object".into()))?;
        let total = binomial(n, r);
        let mut values: Vec<Option<Rational>> = vec![None; total];
        for (key, val) in entries {
            let labels = key
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidVector(format!("bad key {key:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let s = RSubset::new(labels, n)
                .map_err(|e| Error::InvalidVector(format!("key {key:?}: {e}")))?;
            if s.len() != r {
                return Err(Error::InvalidVector(format!(
                    "key {key:?} is not an {r}-subset"
                )));
            }
            let q = match val {
                Value::String(text) => rational::parse(text, allow_decimal)?,
                Value::Number(num) if num.is_i64() => rational::int(num.as_i64().unwrap()),
                Value::Number(num) if allow_decimal => rational::parse(&num.to_string(), true)?,
                other => return Err(Error::InvalidNumber(other.to_string())),
            };
            let k = lex_rank(&s, n)?;
            if values[k].replace(q).is_some() {
                return Err(Error::InvalidVector(format!("duplicate key {key:?}")));
            }
        }
        if let Some(missing) = values.iter().position(Option::is_none) {
            let s = crate::combinat::lex_unrank(missing, n, r)?;
            return Err(Error::InvalidVector(format!("missing entry {s}")));
        }
        let values = values.into_iter().map(Option::unwrap).collect();
        Ok((SubsetVector { n, r, values }, kind))
    }
}

struct Entries<'a>(&'a SubsetVector);

impl Serialize for Entries<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.values.len()))?;
        for (set, val) in self.0.entries() {
            let key: Vec<String> = set.iter().map(|x| x.to_string()).collect();
            map.serialize_entry(&key.join(","), &rational::format(val))?;
        }
        map.end()
    }
}

impl Serialize for SubsetVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SubsetVector", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("entries", &Entries(self))?;
        st.end()
    }
}

fn check_r(n: usize, r: usize) -> Result<()> {
    if r < 2 || r > n {
        return Err(Error::OutOfRange(format!(
            "need 2 <= r <= n, got n={n}, r={r}"
        )));
    }
    Ok(())
}

pub fn d2(t: &PhyloTree) -> SubsetVector {
    let n = t.n_leaves();
    let dm = t.distance_matrix();
    let values = subsets(n, 2)
        .into_iter()
        .map(|p| dm[p[0] - 1][p[1] - 1].clone())
        .collect();
    SubsetVector { n, r: 2, values }
}

/// Entry `I` is the total edge length of the subtree spanned by `I`.
pub fn d_classic(t: &PhyloTree, r: usize) -> Result<SubsetVector> {
    let n = t.n_leaves();
    check_r(n, r)?;
    let values = subsets(n, r)
        .par_iter()
        .map(|set| t.spanned_subtree(set).map(|sub| sub.tree.total_length()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubsetVector { n, r, values })
}

/// Entry `I` is the sum of all pairwise leaf distances inside `I`.
pub fn d_weighted(t: &PhyloTree, r: usize) -> Result<SubsetVector> {
    let n = t.n_leaves();
    check_r(n, r)?;
    let dm = t.distance_matrix();
    let values = subsets(n, r)
        .into_iter()
        .map(|set| {
            subsets_of(&set, 2)
                .iter()
                .fold(Rational::zero(), |acc, p| acc + &dm[p[0] - 1][p[1] - 1])
        })
        .collect();
    Ok(SubsetVector { n, r, values })
}

/// The tropicalised monomial map: `x ↦ (Σ_{pairs ⊆ I} x_pair)_I`.
pub fn apply_trop_phi(v: &SubsetVector, r: usize) -> Result<SubsetVector> {
    if v.r != 2 {
        return Err(Error::Dimension(format!(
            "apply_trop_phi takes a pair vector, got r={}",
            v.r
        )));
    }
    check_r(v.n, r)?;
    let values = subsets(v.n, r)
        .into_iter()
        .map(|set| {
            subsets_of(&set, 2)
                .iter()
                .fold(Rational::zero(), |acc, p| acc + v.at(p))
        })
        .collect();
    Ok(SubsetVector { n: v.n, r, values })
}

/// Applies the explicit left inverse, recovering `d_2` from `d_r^wt`.
pub fn recover_d2(w: &SubsetVector) -> Result<SubsetVector> {
    let (n, r) = (w.n, w.r);
    if r < 2 || r + 2 > n {
        return Err(Error::OutOfRange(format!(
            "recover_d2 needs 2 <= r <= n-2, got n={n}, r={r}"
        )));
    }
    let values = left_inverse_matrix(n, r)?.mul_vec(&w.values)?;
    Ok(SubsetVector { n, r: 2, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trop_phi_matrix;
    use crate::rational::{frac, int};
    use crate::tree::parse_newick;

    fn star4() -> PhyloTree {
        parse_newick("(1:1,2:1,3:1,4:1);").unwrap()
    }

    fn quartet() -> PhyloTree {
        parse_newick("(1:1,2:1,(3:1,4:1):1);").unwrap()
    }

    #[test]
    fn d2_examples() {
        assert!(d2(&star4()).values().iter().all(|v| *v == int(2)));
        let q = d2(&quartet());
        let expect = [2, 3, 3, 3, 3, 2]; // 12 13 14 23 24 34
        assert_eq!(q.values(), expect.map(int).as_slice());
    }

    #[test]
    fn split_metric_d2_is_straddle_indicator() {
        let topo = quartet().topology();
        for e in 0..topo.edge_count() {
            let split = topo.tree().edge_split(e).unwrap();
            let v = d2(&topo.split_metric(e).unwrap());
            for (pair, val) in v.entries() {
                assert_eq!(*val, int(split.separates(pair[0], pair[1]) as i64));
            }
        }
    }

    #[test]
    fn star_classic_and_weighted() {
        let c = d_classic(&star4(), 3).unwrap();
        assert!(c.values().iter().all(|v| *v == int(3)));
        let w = d_weighted(&star4(), 3).unwrap();
        assert!(w.values().iter().all(|v| *v == int(6)));
        assert_eq!(w, c.scale(&int(2)));
        assert!(d_classic(&star4(), 5).is_err());
        assert!(d_weighted(&star4(), 1).is_err());
    }

    #[test]
    fn split_metric_weighted_formula() {
        let t = parse_newick("((1,2),(3,4),(5,(6,7)));").unwrap().topology();
        for e in 0..t.edge_count() {
            let split = t.tree().edge_split(e).unwrap();
            let sm = t.split_metric(e).unwrap();
            let w = d_weighted(&sm, 4).unwrap();
            let c = d_classic(&sm, 4).unwrap();
            for ((set, wv), cv) in w.entries().zip(c.values()) {
                let inside = set.iter().filter(|x| split.side().contains(x)).count() as i64;
                let outside = set.len() as i64 - inside;
                assert_eq!(*wv, int(inside * outside));
                assert_eq!(*cv, int((inside > 0 && outside > 0) as i64));
            }
        }
    }

    #[test]
    fn phi_factorization_on_quartet() {
        let t = quartet();
        assert_eq!(
            apply_trop_phi(&d2(&t), 3).unwrap(),
            d_weighted(&t, 3).unwrap()
        );
        assert_eq!(apply_trop_phi(&d2(&t), 2).unwrap(), d2(&t));
        let z = SubsetVector::zeros(5, 2).unwrap();
        assert!(apply_trop_phi(&z, 3)
            .unwrap()
            .values()
            .iter()
            .all(Zero::is_zero));
    }

    #[test]
    fn apply_trop_phi_is_matrix_action() {
        let x = SubsetVector::new(6, 2, (0..15).map(|k| frac(k * k - 7, k + 1)).collect()).unwrap();
        let via_matrix = trop_phi_matrix(6, 4).unwrap().mul_vec(x.values()).unwrap();
        assert_eq!(
            apply_trop_phi(&x, 4).unwrap().values(),
            via_matrix.as_slice()
        );
    }

    #[test]
    fn recover_examples() {
        let t = parse_newick("((1:1,2:1):1,(3:1,4:1):1,(5:1,6:1):1);").unwrap();
        let w = d_weighted(&t, 3).unwrap();
        assert_eq!(recover_d2(&w).unwrap(), d2(&t));
        let d = d2(&t);
        assert_eq!(recover_d2(&d).unwrap(), d);
        let a = frac(-5, 3);
        let w2 = d_weighted(&quartet(), 2).unwrap();
        let lhs = recover_d2(&w.scale(&a).add(&d_weighted(&t, 3).unwrap()).unwrap()).unwrap();
        let rhs = recover_d2(&w)
            .unwrap()
            .scale(&a)
            .add(&recover_d2(&d_weighted(&t, 3).unwrap()).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
        assert!(recover_d2(&d_weighted(&quartet(), 3).unwrap()).is_err());
        assert_eq!(recover_d2(&w2).unwrap(), w2);
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let w = d_weighted(&quartet(), 3).unwrap();
        let text = w.to_json();
        assert!(text.contains("\"1,2,3\": \"8\""));
        let (back, kind) = SubsetVector::from_json(&text, false).unwrap();
        assert_eq!(back, w);
        assert_eq!(kind, None);
        let missing = r#"{"n":4,"r":2,"entries":{"1,2":"1"}}"#;
        assert!(matches!(
            SubsetVector::from_json(missing, false),
            Err(Error::InvalidVector(_))
        ));
        let decimal = r#"{"n":3,"r":2,"entries":{"1,2":"0.5","1,3":1,"2,3":"1/3"}}"#;
        assert!(SubsetVector::from_json(decimal, false).is_err());
        let (v, _) = SubsetVector::from_json(decimal, true).unwrap();
        assert_eq!(v.values(), &[frac(1, 2), int(1), frac(1, 3)]);
        let float = r#"{"n":3,"r":2,"entries":{"1,2":0.5,"1,3":1,"2,3":"1/3"}}"#;
        assert!(SubsetVector::from_json(float, false).is_err());
        assert!(SubsetVector::from_json(float, true).is_ok());
        let bad_key = r#"{"n":3,"r":2,"entries":{"1,4":"1","1,3":"1","2,3":"1"}}"#;
        assert!(SubsetVector::from_json(bad_key, false).is_err());
        let wrong_size = r#"{"n":3,"r":2,"entries":{"1,2,3":"1"}}"#;
        assert!(SubsetVector::from_json(wrong_size, false).is_err());
        let tagged = r#"{"kind":"pluecker","n":3,"r":2,"entries":{"1,2":"1","1,3":"1","2,3":"1"}}"#;
        assert_eq!(
            SubsetVector::from_json(tagged, false).unwrap().1.as_deref(),
            Some("pluecker")
        );
    }
}
