//! Reproduction of the reference results: the two 13×35 star
//! matrices for the 7-leaf cone, their ranks and kernel, the 15 cubes, the
//! left inverse, and the rank of the cube relation matrix.

use std::path::Path;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::balancing::{reference_cone, star_matrix, MapKind};
use crate::combinat::{binomial, enumerate_cubes};
use crate::error::{Error, Result};
use crate::linalg::{cube_relation_matrix, left_inverse_matrix, trop_phi_matrix, RationalMatrix};

pub const CLASSIC_FILE: &str = "cone7_classic.txt";
pub const WEIGHTED_FILE: &str = "cone7_weighted.txt";

/// Golden row order: pendant edges 1..7, internal edges `{5,6}`, `{3,4}`,
/// `{1,2}`, then the resolution edges `1234|567`, `1256|347`, `127|3456`.
const BUILTIN_CLASSIC: &str = include_str!("../data/cone7_classic.txt");
const BUILTIN_WEIGHTED: &str = include_str!("../data/cone7_weighted.txt");

pub const EXPECTED_KERNEL: [i64; 13] = [0, 0, 0, 0, 0, 0, 1, 1, 1, 1, -1, -1, -1];

/// The cube with black `{123,145,246,356}` and white `{124,135,236,456}`.
pub const EXAMPLE_CUBE: ([[usize; 3]; 4], [[usize; 3]; 4]) = (
    [[1, 2, 3], [1, 4, 5], [2, 4, 6], [3, 5, 6]],
    [[1, 2, 4], [1, 3, 5], [2, 3, 6], [4, 5, 6]],
);

#[derive(Clone, Debug)]
pub struct Golden {
    pub classic: RationalMatrix,
    pub weighted: RationalMatrix,
}

impl Golden {
    pub fn builtin() -> Golden {
        Golden::from_texts(BUILTIN_CLASSIC, BUILTIN_WEIGHTED).expect("bundled golden files parse")
    }

    pub fn from_texts(classic: &str, weighted: &str) -> Result<Golden> {
        Ok(Golden {
            classic: RationalMatrix::parse_dump(classic)?,
            weighted: RationalMatrix::parse_dump(weighted)?,
        })
    }

    pub fn from_dir(dir: &Path) -> Result<Golden> {
        let read = |name: &str| {
            std::fs::read_to_string(dir.join(name))
                .map_err(|e| Error::InvalidVector(format!("{}: {e}", dir.join(name).display())))
        };
        Golden::from_texts(&read(CLASSIC_FILE)?, &read(WEIGHTED_FILE)?)
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "ok": self.all_ok(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "status": if c.ok { "ok" } else { "FAILED" },
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

/// `perm[k]` is the row of `ours` equal to row `k` of `target`, each row of
/// `ours` used once. `None` when the row multisets differ.
pub fn match_rows(ours: &RationalMatrix, target: &RationalMatrix) -> Option<Vec<usize>> {
    if ours.rows() != target.rows() || ours.cols() != target.cols() {
        return None;
    }
    let mut used = vec![false; ours.rows()];
    let mut perm = Vec::with_capacity(target.rows());
    for k in 0..target.rows() {
        let i = (0..ours.rows()).find(|&i| !used[i] && ours.row(i) == target.row(k))?;
        used[i] = true;
        perm.push(i);
    }
    Some(perm)
}

fn check(name: &'static str, ok: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        ok,
        detail: detail.into(),
    }
}

pub fn verify_reference(golden: &Golden) -> Result<VerifyReport> {
    let g = reference_cone();
    let classic = star_matrix(&g, 4, MapKind::Classic)?;
    let weighted = star_matrix(&g, 4, MapKind::Weighted)?;
    let mut checks = Vec::new();

    let pc = match_rows(&classic, &golden.classic);
    let pw = match_rows(&weighted, &golden.weighted);
    let matrices_ok = pc.is_some() && pw.is_some() && pc == pw;
    checks.push(check(
        "star_matrices",
        matrices_ok,
        match (&pc, &pw) {
            (Some(a), Some(b)) if a == b => {
                format!("both 13x35 matrices match; canonical row for each golden row: {a:?}")
            }
            (Some(_), Some(_)) => "matrices match under different row orders".to_string(),
            (None, _) => "classic matrix differs from the golden file".to_string(),
            (_, None) => "weighted matrix differs from the golden file".to_string(),
        },
    ));

    let (rc, rw) = (classic.rank(), weighted.rank());
    checks.push(check(
        "ranks",
        rc == 13 && rw == 12,
        format!("classic rank {rc} (want 13), weighted rank {rw} (want 12)"),
    ));

    // kernel in the golden row order
    let ordered = pw
        .as_ref()
        .map_or_else(|| weighted.clone(), |p| weighted.select_rows(p));
    let kernel = ordered.left_kernel_basis();
    let expected: Vec<BigInt> = EXPECTED_KERNEL.iter().map(|&x| BigInt::from(x)).collect();
    let kernel_ok = kernel.len() == 1 && kernel[0] == expected;
    let shown: Vec<String> = kernel
        .iter()
        .map(|v| format!("{:?}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
        .collect();
    checks.push(check(
        "kernel_vector",
        kernel_ok,
        format!("left kernel basis {}", shown.join(", ")),
    ));

    let cubes = enumerate_cubes();
    let has_example = cubes.iter().any(|c| (c.black, c.white) == EXAMPLE_CUBE);
    checks.push(check(
        "cubes",
        cubes.len() == 15 && has_example,
        format!(
            "{} cubes; example cube {}",
            cubes.len(),
            if has_example { "present" } else { "missing" }
        ),
    ));

    let inv_ok = left_inverse_matrix(7, 4)?
        .mul(&trop_phi_matrix(7, 4)?)?
        .is_identity();
    checks.push(check("left_inverse", inv_ok, "M+ M = I for (n,r) = (7,4)"));

    let mut details = Vec::new();
    let mut rank_ok = true;
    for (n, r) in [(6, 3), (7, 4)] {
        let rank = cube_relation_matrix(n, r)?.rank();
        let want = binomial(n, r) - binomial(n, 2);
        rank_ok &= rank == want;
        details.push(format!("({n},{r}): rank {rank}, want {want}"));
    }
    checks.push(check("cube_rank", rank_ok, details.join("; ")));

    Ok(VerifyReport { checks })
}
