//! The 15×15 permutation/contraction system `A 𝒩 = ℬ`.
//!
//! The unknown column at a fixed index triple is
//!
//! ```text
//! 𝒩 = (N_{αμν}, N_{ναμ}, N_{μνα}, N_{ανμ}, N_{νμα}, N_{μαν},
//!      M⁽¹⁾_{αμν}, M⁽¹⁾_{ναμ}, M⁽¹⁾_{μνα}, M⁽²⁾_{…}, M⁽³⁾_{…})
//! ```
//!
//! Rows come from four equation templates (the reduced equation, and its
//! three ε-contractions), each instantiated under several renamings of the
//! free indices. Dual terms in anti-cyclic order are folded onto the cyclic
//! columns through `M_{xzy} = −M_{xyz}`.

use crate::linalg::{self, DegeneracyPolicy, Lu, Matrix};
use crate::params::ParameterSet;
use crate::rhs::RhsBundle;
use crate::tensor::{DualKind, Pattern, Rank3Tensor};

/// Size of the permutation system.
pub const SYSTEM_DIM: usize = 15;

/// A slot of the unknown column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unknown {
    N,
    M(DualKind),
}

/// `coef · X_{pattern}`, with X the unknown tensor or one of its duals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub unknown: Unknown,
    pub pattern: Pattern,
}

const fn term(coef: f64, unknown: Unknown, pattern: Pattern) -> Term {
    Term {
        coef,
        unknown,
        pattern,
    }
}

/// One equation template: six permutation terms plus three dual terms.
pub type Template = [Term; 9];

const M1: Unknown = Unknown::M(DualKind::First);
const M2: Unknown = Unknown::M(DualKind::Second);
const M3: Unknown = Unknown::M(DualKind::Third);

fn with_perm_coefs(coefs: [f64; 6], duals: [Term; 3]) -> Template {
    let p = Pattern::ALL;
    [
        term(coefs[0], Unknown::N, p[0]),
        term(coefs[1], Unknown::N, p[1]),
        term(coefs[2], Unknown::N, p[2]),
        term(coefs[3], Unknown::N, p[3]),
        term(coefs[4], Unknown::N, p[4]),
        term(coefs[5], Unknown::N, p[5]),
        duals[0],
        duals[1],
        duals[2],
    ]
}

/// `Σ aᵢ N_{σᵢ} + Σₖ (bₖ₁ M⁽ᵏ⁾_{αμν} + bₖ₂ M⁽ᵏ⁾_{ναμ} + bₖ₃ M⁽ᵏ⁾_{μνα}) = ĥ_{αμν}`.
///
/// This template has more than three dual terms, so it is returned as a
/// plain row over the unknown column instead.
pub fn reduced_row(p: &ParameterSet, rename: Pattern) -> [f64; SYSTEM_DIM] {
    let mut row = [0.0; SYSTEM_DIM];
    for (i, pat) in Pattern::ALL.iter().enumerate() {
        accumulate(&mut row, &term(p.a[i], Unknown::N, *pat), rename);
    }
    for (k, kind) in [M1, M2, M3].into_iter().enumerate() {
        let bk = p.b_mat[k];
        accumulate(&mut row, &term(bk[0], kind, Pattern::AMN), rename);
        accumulate(&mut row, &term(bk[1], kind, Pattern::NAM), rename);
        accumulate(&mut row, &term(bk[2], kind, Pattern::MNA), rename);
    }
    row
}

/// Contraction with `ε^{αμ}{}_{βγ}`; right side `b̆_{αμν}`.
pub fn breve_template(p: &ParameterSet, sign_factor: f64) -> Template {
    let (a, b, s) = (|i| p.perm(i), |k, l| p.b(k, l), sign_factor);
    let p1 = s * (2.0 * b(1, 2) - b(1, 1) - b(1, 3));
    let p2 = s * (2.0 * b(2, 2) - b(2, 1) - b(2, 3));
    let p3 = s * (2.0 * b(3, 2) - b(3, 1) - b(3, 3));
    with_perm_coefs(
        [p1, p3, -p2, p2, -p3, -p1],
        [
            term(a(1) - a(6), M1, Pattern::NAM),
            term(a(4) - a(3), M2, Pattern::NAM),
            term(a(2) - a(5), M3, Pattern::NAM),
        ],
    )
}

/// Contraction with `ε^{αν}{}_{βγ}`; right side `b̄_{αμν}`.
pub fn bar_template(p: &ParameterSet, sign_factor: f64) -> Template {
    let (a, b, s) = (|i| p.perm(i), |k, l| p.b(k, l), sign_factor);
    let q1 = s * (b(1, 1) + b(1, 2) - 2.0 * b(1, 3));
    let q2 = s * (b(2, 1) + b(2, 2) - 2.0 * b(2, 3));
    let q3 = s * (b(3, 1) + b(3, 2) - 2.0 * b(3, 3));
    with_perm_coefs(
        [q2, -q1, -q3, q1, -q2, q3],
        [
            term(a(4) - a(2), M1, Pattern::MAN),
            term(a(1) - a(5), M2, Pattern::MAN),
            term(a(6) - a(3), M3, Pattern::MAN),
        ],
    )
}

/// Contraction with `ε^{μν}{}_{βγ}`; right side `r̊_{αμν}`.
pub fn ring_template(p: &ParameterSet, sign_factor: f64) -> Template {
    let (a, b, s) = (|i| p.perm(i), |k, l| p.b(k, l), sign_factor);
    let r1 = s * (2.0 * b(1, 1) - b(1, 2) - b(1, 3));
    let r2 = s * (2.0 * b(2, 1) - b(2, 2) - b(2, 3));
    let r3 = s * (2.0 * b(3, 1) - b(3, 2) - b(3, 3));
    with_perm_coefs(
        [r3, -r2, r1, -r3, -r1, r2],
        [
            term(a(3) - a(5), M1, Pattern::AMN),
            term(a(6) - a(2), M2, Pattern::AMN),
            term(a(1) - a(4), M3, Pattern::AMN),
        ],
    )
}

/// Column of the unknown vector addressed by `X_{pattern}`, with the sign
/// picked up when a dual is read in anti-cyclic order.
pub fn unknown_slot(unknown: Unknown, pattern: Pattern) -> (usize, f64) {
    match unknown {
        Unknown::N => {
            let k = Pattern::ALL
                .iter()
                .position(|q| *q == pattern)
                .expect("pattern is a permutation");
            (k, 1.0)
        }
        Unknown::M(kind) => {
            let base = 6 + 3 * kind as usize;
            let (cyc, sign) = if pattern.is_cyclic() {
                (pattern, 1.0)
            } else {
                (pattern.swap_last(), -1.0)
            };
            let off = match cyc {
                Pattern::AMN => 0,
                Pattern::NAM => 1,
                _ => 2,
            };
            (base + off, sign)
        }
    }
}

fn accumulate(row: &mut [f64; SYSTEM_DIM], t: &Term, rename: Pattern) {
    let (col, sign) = unknown_slot(t.unknown, t.pattern.substitute(rename));
    row[col] += sign * t.coef;
}

fn template_row(template: &Template, rename: Pattern) -> [f64; SYSTEM_DIM] {
    let mut row = [0.0; SYSTEM_DIM];
    for t in template {
        accumulate(&mut row, t, rename);
    }
    row
}

/// Renamings applied to each ε-contracted template: identity, one cycle
/// `α → μ → ν → α`, and two cycles.
const CYCLES: [Pattern; 3] = [Pattern::AMN, Pattern::MNA, Pattern::NAM];

/// The coefficient matrix A. Row `r` pairs with slot `r` of
/// [`crate::rhs::COLUMN_ORDER`].
pub fn build_a_matrix(p: &ParameterSet, sign_factor: f64) -> Matrix<SYSTEM_DIM> {
    let mut a = [[0.0; SYSTEM_DIM]; SYSTEM_DIM];
    for (r, rename) in Pattern::ALL.iter().enumerate() {
        a[r] = reduced_row(p, *rename);
    }
    let templates = [
        breve_template(p, sign_factor),
        bar_template(p, sign_factor),
        ring_template(p, sign_factor),
    ];
    for (t, template) in templates.iter().enumerate() {
        for (c, rename) in CYCLES.iter().enumerate() {
            a[6 + 3 * t + c] = template_row(template, *rename);
        }
    }
    a
}

/// The unknown column read from a known tensor and its duals.
pub fn unknown_column(
    n: &Rank3Tensor,
    duals: &[Rank3Tensor; 3],
    at: (usize, usize, usize),
) -> [f64; SYSTEM_DIM] {
    let mut col = [0.0; SYSTEM_DIM];
    for (k, pat) in Pattern::ALL.iter().enumerate() {
        col[k] = n.at_pattern(*pat, at);
    }
    for (k, m) in duals.iter().enumerate() {
        for (c, pat) in [Pattern::AMN, Pattern::NAM, Pattern::MNA]
            .iter()
            .enumerate()
        {
            col[6 + 3 * k + c] = m.at_pattern(*pat, at);
        }
    }
    col
}

/// A refused by the degeneracy gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateA {
    pub det: f64,
    pub rcond: f64,
}

/// A, its LU determinant and inverse (when it exists), before gating.
#[derive(Debug, Clone, PartialEq)]
pub struct ADiagnostics {
    pub a_mat: Matrix<SYSTEM_DIM>,
    pub a_inv: Option<Matrix<SYSTEM_DIM>>,
    pub det: f64,
    pub rcond: f64,
}

impl ADiagnostics {
    pub fn new(p: &ParameterSet, sign_factor: f64) -> Self {
        let a_mat = build_a_matrix(p, sign_factor);
        let lu = Lu::factor(&a_mat);
        let a_inv = lu.inverse();
        let rcond = a_inv.as_ref().map_or(0.0, |inv| linalg::rcond(&a_mat, inv));
        Self {
            a_mat,
            a_inv,
            det: lu.det(),
            rcond,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermSystem {
    a_mat: Matrix<SYSTEM_DIM>,
    a_inv: Matrix<SYSTEM_DIM>,
    det_a: f64,
    rcond: f64,
}

impl PermSystem {
    pub fn new(
        p: &ParameterSet,
        sign_factor: f64,
        policy: &DegeneracyPolicy,
    ) -> Result<Self, DegenerateA> {
        Self::from_diagnostics(ADiagnostics::new(p, sign_factor), policy)
    }

    pub fn from_diagnostics(
        diag: ADiagnostics,
        policy: &DegeneracyPolicy,
    ) -> Result<Self, DegenerateA> {
        let ADiagnostics {
            a_mat,
            a_inv,
            det,
            rcond,
        } = diag;
        let max = linalg::max_norm(&a_mat);
        match a_inv {
            Some(a_inv) if !policy.is_degenerate(det, max, SYSTEM_DIM as i32, rcond) => Ok(Self {
                a_mat,
                a_inv,
                det_a: det,
                rcond,
            }),
            _ => Err(DegenerateA { det, rcond }),
        }
    }

    pub fn a_mat(&self) -> &Matrix<SYSTEM_DIM> {
        &self.a_mat
    }

    pub fn a_inv(&self) -> &Matrix<SYSTEM_DIM> {
        &self.a_inv
    }

    /// `α̃₁ᵢ`, the first row of `A⁻¹`.
    pub fn first_row_inv(&self) -> &[f64; SYSTEM_DIM] {
        &self.a_inv[0]
    }

    pub fn det(&self) -> f64 {
        self.det_a
    }

    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    /// `𝒩 = A⁻¹ ℬ`.
    pub fn solve_component_system(&self, rhs: &[f64; SYSTEM_DIM]) -> [f64; SYSTEM_DIM] {
        core::array::from_fn(|i| pairwise_dot(&self.a_inv[i], rhs))
    }

    /// `N_{αμν} = Σᵢ α̃₁ᵢ ℬᵢ(α, μ, ν)` at every index triple.
    pub fn extract_solution(&self, bundle: &RhsBundle) -> Rank3Tensor {
        let row = self.first_row_inv();
        Rank3Tensor::from_fn(|a, m, n| pairwise_dot(row, &bundle.column((a, m, n))))
    }
}

/// Dot product summed as a balanced tree in a fixed order.
pub fn pairwise_dot(x: &[f64; SYSTEM_DIM], y: &[f64; SYSTEM_DIM]) -> f64 {
    let prods: [f64; SYSTEM_DIM] = core::array::from_fn(|i| x[i] * y[i]);
    pairwise_sum(&prods)
}

fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => {
            let (l, r) = v.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rhs::COLUMN_ORDER;

    #[test]
    fn first_row_is_the_coefficient_list() {
        let p = ParameterSet::random(17, 1.0);
        let a = build_a_matrix(&p, -1.0);
        let expected = [
            p.a[0],
            p.a[1],
            p.a[2],
            p.a[3],
            p.a[4],
            p.a[5],
            p.b(1, 1),
            p.b(1, 2),
            p.b(1, 3),
            p.b(2, 1),
            p.b(2, 2),
            p.b(2, 3),
            p.b(3, 1),
            p.b(3, 2),
            p.b(3, 3),
        ];
        assert_eq!(a[0], expected);
    }

    #[test]
    fn last_row_matches_explicit_listing() {
        for s in [1.0, -1.0] {
            let p = ParameterSet::random(23, 1.0);
            let a = build_a_matrix(&p, s);
            let (ap, b) = (|i| p.perm(i), |k, l| p.b(k, l));
            let r1 = s * (2.0 * b(1, 1) - b(1, 2) - b(1, 3));
            let r2 = s * (2.0 * b(2, 1) - b(2, 2) - b(2, 3));
            let r3 = s * (2.0 * b(3, 1) - b(3, 2) - b(3, 3));
            let expected = [
                r1,
                r3,
                -r2,
                r2,
                -r3,
                -r1,
                0.0,
                ap(3) - ap(5),
                0.0,
                0.0,
                ap(6) - ap(2),
                0.0,
                0.0,
                ap(1) - ap(4),
                0.0,
            ];
            for (x, y) in a[14].iter().zip(expected) {
                assert!((x - y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn identity_params_give_signed_permutation() {
        let a = build_a_matrix(&ParameterSet::identity(), 1.0);
        for row in a.iter() {
            assert_eq!(row.iter().filter(|x| **x != 0.0).count(), 1);
            assert_eq!(row.iter().map(|x| x.abs()).sum::<f64>(), 1.0);
        }
        // (a₁ − a₆) sits in the M⁽¹⁾_{ναμ} column of row 7
        assert_eq!(a[6][7], 1.0);
        assert_eq!(a[0][0], 1.0);
        let det = Lu::factor(&a).det();
        assert_eq!(det.abs(), 1.0);
        assert_eq!(build_a_matrix(&ParameterSet::ZERO, 1.0), [[0.0; 15]; 15]);
    }

    #[test]
    fn rows_pair_with_rhs_slots() {
        let mut renames = Pattern::ALL.to_vec();
        for _ in 0..3 {
            renames.extend_from_slice(&CYCLES);
        }
        for ((_, pat), rename) in COLUMN_ORDER.iter().zip(renames) {
            assert_eq!(Pattern::AMN.substitute(rename), *pat);
        }
    }

    #[test]
    fn anti_cyclic_duals_fold_with_sign() {
        assert_eq!(unknown_slot(M2, Pattern::MAN), (6 + 3 + 2, -1.0));
        assert_eq!(unknown_slot(M3, Pattern::NAM), (6 + 6 + 1, 1.0));
        assert_eq!(unknown_slot(Unknown::N, Pattern::NMA), (4, 1.0));
    }

    #[test]
    fn component_solve_residual() {
        let p = ParameterSet::random(5, 1.0);
        let ps = PermSystem::new(&p, 1.0, &DegeneracyPolicy::default()).unwrap();
        assert_eq!(ps.solve_component_system(&[0.0; 15]), [0.0; 15]);
        let rhs: [f64; 15] = core::array::from_fn(|i| (i as f64 * 0.37).sin());
        let x = ps.solve_component_system(&rhs);
        let back = linalg::mat_vec(ps.a_mat(), &x);
        let scale = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (b, r) in back.iter().zip(rhs) {
            assert!((b - r).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn identity_solve_of_unit_vector() {
        let ps =
            PermSystem::new(&ParameterSet::identity(), 1.0, &DegeneracyPolicy::default()).unwrap();
        let mut e1 = [0.0; 15];
        e1[0] = 1.0;
        assert_eq!(ps.solve_component_system(&e1)[0], 1.0);
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let v: [f64; 15] = core::array::from_fn(|i| i as f64);
        assert_eq!(pairwise_sum(&v), 105.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
