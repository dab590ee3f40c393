//! Gauss–Legendre quadrature, reference element matrices, and global
//! assembly of the Galerkin system matrices.
//!
//! On a uniform mesh every element sees the same four basis restrictions
//! ([`BasisConstants::element_shape`]), so the three 4×4 element matrices
//!
//! ```text
//! A^e[j][i] = ∫ φ_j φ_i   dt      (mass)
//! B^e[j][i] = ∫ φ_j φ_i′  dt      (advection)
//! C^e[j][i] = ∫ φ_j φ_i″  dt      (diffusion)
//! ```
//!
//! (integrals over one element, row `j` = test function, column `i` = trial
//! function) are computed once and scattered into global septa-diagonal
//! matrices of size `(n + 3)²` — one row/column per basis function
//! `B_{−1} ..= B_{n+1}` on an `n`-element mesh.

use crate::basis::{BasisConstants, Mesh};
use crate::linalg::BandedMatrix;
use thiserror::Error;

/// Smallest accepted quadrature order for matrix assembly; below this the
/// element integrals of the quartic-like integrands are not exact to f64 and
/// every downstream tolerance would silently degrade.
pub const MIN_ASSEMBLY_QUAD_ORDER: usize = 8;

/// Largest supported quadrature order (node computation is validated over
/// `1..=30`).
pub const MAX_QUAD_ORDER: usize = 30;

/// Errors from quadrature-rule construction and matrix assembly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssemblyError {
    /// Requested Gauss–Legendre order outside `1..=`[`MAX_QUAD_ORDER`].
    #[error("Gauss-Legendre order {0} outside supported range 1..={MAX_QUAD_ORDER}")]
    QuadratureOrderOutOfRange(usize),
    /// Assembly requires at least [`MIN_ASSEMBLY_QUAD_ORDER`] points.
    #[error(
        "assembly quadrature order {0} below minimum {MIN_ASSEMBLY_QUAD_ORDER} \
         (element integrals would lose full double precision)"
    )]
    QuadratureOrderTooLow(usize),
}

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[−1, 1]`,
/// exact for polynomials of degree `≤ 2·order − 1`.
///
/// Nodes are the roots of the Legendre polynomial `P_order`, found by Newton
/// iteration on the three-term recurrence from interlacing initial guesses;
/// weights are `2 / ((1 − x²)·P′_order(x)²)`. Returned in increasing node
/// order.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>), AssemblyError> {
    if order == 0 || order > MAX_QUAD_ORDER {
        return Err(AssemblyError::QuadratureOrderOutOfRange(order));
    }
    let n = order;
    // P_n(x) and P_n′(x) by the three-term recurrence.
    let legendre = |x: f64| -> (f64, f64) {
        if n == 1 {
            return (x, 1.0);
        }
        let mut p0 = 1.0;
        let mut p1 = x;
        for m in 2..=n {
            let pm = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
            p0 = p1;
            p1 = pm;
        }
        (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
    };
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Exploit symmetry: compute the non-positive half, mirror the rest.
    let half = n / 2 + n % 2;
    for k in 0..half {
        // Tricomi-style initial guess for the k-th root (descending order).
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(x);
            let step = p / dp;
            x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        // Fresh derivative at the converged node: the last Newton step leaves
        // the in-loop derivative attached to the previous iterate, which costs
        // ~1e−13 in the weight.
        let (_, dp) = legendre(x);
        let idx_hi = n - 1 - k;
        nodes[idx_hi] = x;
        nodes[k] = -x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[idx_hi] = w;
        weights[k] = w;
    }
    if n % 2 == 1 {
        // Center the middle node exactly.
        nodes[n / 2] = 0.0;
        // Weight from the recurrence at x = 0.
        let mut p0 = 1.0;
        let mut p1 = 0.0;
        for m in 2..=n {
            let pm = -((m - 1) as f64) * p0 / m as f64;
            p0 = p1;
            p1 = pm;
        }
        let dp = n as f64 * p0; // P_n′(0) = n·P_{n−1}(0)
        weights[n / 2] = 2.0 / (dp * dp);
    }
    Ok((nodes, weights))
}

/// The three 4×4 element matrices; `row` = test index `j`, `col` = trial
/// index `i`, both over the four basis functions active on an element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMatrices {
    /// `∫ φ_j φ_i` over one element.
    pub mass: [[f64; 4]; 4],
    /// `∫ φ_j φ_i′` over one element.
    pub advection: [[f64; 4]; 4],
    /// `∫ φ_j φ_i″` over one element.
    pub diffusion: [[f64; 4]; 4],
}

/// Computes the reference element matrices by `quad_order`-point
/// Gauss–Legendre quadrature mapped to `[0, h]`.
///
/// Requires [`MIN_ASSEMBLY_QUAD_ORDER`]` ≤ quad_order ≤ `[`MAX_QUAD_ORDER`].
/// For the benchmark tensions (`p·h ≲ 0.01`) the default order 10 is exact to
/// double precision; strong tension (`p·h ≳ 10`) needs orders near the top of
/// the range because the integrands grow like `e^{2·p·h}`.
pub fn reference_element_matrices(
    constants: &BasisConstants,
    quad_order: usize,
) -> Result<ElementMatrices, AssemblyError> {
    if quad_order > MAX_QUAD_ORDER {
        return Err(AssemblyError::QuadratureOrderOutOfRange(quad_order));
    }
    if quad_order < MIN_ASSEMBLY_QUAD_ORDER {
        return Err(AssemblyError::QuadratureOrderTooLow(quad_order));
    }
    let (nodes, weights) = gauss_legendre(quad_order)?;
    let h = constants.h;
    let mut mass = [[0.0; 4]; 4];
    let mut advection = [[0.0; 4]; 4];
    let mut diffusion = [[0.0; 4]; 4];
    for (x, w) in nodes.iter().zip(&weights) {
        let t = 0.5 * h * (x + 1.0);
        let scale = 0.5 * h * w;
        let mut val = [0.0; 4];
        let mut d1 = [0.0; 4];
        let mut d2 = [0.0; 4];
        for local in 0..4 {
            val[local] = constants.element_shape(local, t, 0);
            d1[local] = constants.element_shape(local, t, 1);
            d2[local] = constants.element_shape(local, t, 2);
        }
        for j in 0..4 {
            let test = scale * val[j];
            for i in 0..4 {
                mass[j][i] += test * val[i];
                advection[j][i] += test * d1[i];
                diffusion[j][i] += test * d2[i];
            }
        }
    }
    Ok(ElementMatrices {
        mass,
        advection,
        diffusion,
    })
}

/// The assembled global Galerkin matrices, each `(n + 3) × (n + 3)` with
/// bandwidth 3. Row/column `g` corresponds to basis function `B_{g−1}`.
#[derive(Debug, Clone)]
pub struct GlobalMatrices {
    /// Global mass matrix `∫ B_j B_i`.
    pub mass: BandedMatrix,
    /// Global advection matrix `∫ B_j B_i′`.
    pub advection: BandedMatrix,
    /// Global diffusion matrix `∫ B_j B_i″`.
    pub diffusion: BandedMatrix,
}

/// Assembles the global mass/advection/diffusion matrices for `mesh` by
/// scattering the reference element matrices over all `n` elements:
/// element `m` touches basis functions `B_{m−1} ..= B_{m+2}`, i.e. global
/// rows/columns `m ..= m+3`.
///
/// `constants` must have been built with `h = mesh.h()`.
pub fn assemble_global(
    mesh: &Mesh,
    constants: &BasisConstants,
    quad_order: usize,
) -> Result<GlobalMatrices, AssemblyError> {
    let elem = reference_element_matrices(constants, quad_order)?;
    let size = mesh.n() + 3;
    let mut mass = BandedMatrix::new(size, 3);
    let mut advection = BandedMatrix::new(size, 3);
    let mut diffusion = BandedMatrix::new(size, 3);
    for m in 0..mesh.n() {
        for j in 0..4 {
            for i in 0..4 {
                mass.add(m + j, m + i, elem.mass[j][i]);
                advection.add(m + j, m + i, elem.advection[j][i]);
                diffusion.add(m + j, m + i, elem.diffusion[j][i]);
            }
        }
    }
    Ok(GlobalMatrices {
        mass,
        advection,
        diffusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::eval_basis;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    // ---------------------------------------------------------------
    // Gauss–Legendre rule.
    // ---------------------------------------------------------------

    #[test]
    fn low_order_rules_match_closed_forms() {
        let (x, w) = gauss_legendre(1).unwrap();
        assert_eq!(x, vec![0.0]);
        assert_eq!(w, vec![2.0]);

        let (x, w) = gauss_legendre(2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert_relative_eq!(x[0], -r, max_relative = 1e-15);
        assert_relative_eq!(x[1], r, max_relative = 1e-15);
        assert_relative_eq!(w[0], 1.0, max_relative = 1e-15);
        assert_relative_eq!(w[1], 1.0, max_relative = 1e-15);

        let (x, w) = gauss_legendre(3).unwrap();
        let r = (3.0f64 / 5.0).sqrt();
        assert_relative_eq!(x[0], -r, max_relative = 1e-15);
        assert_eq!(x[1], 0.0);
        assert_relative_eq!(x[2], r, max_relative = 1e-15);
        assert_relative_eq!(w[0], 5.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(w[1], 8.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(w[2], 5.0 / 9.0, max_relative = 1e-15);
    }

    #[test]
    fn order_10_rule_matches_reference_values() {
        // Positive nodes/weights of the 10-point rule (standard tabulation).
        let nodes = [
            0.148_874_338_981_631_21,
            0.433_395_394_129_247_19,
            0.679_409_568_299_024_4,
            0.865_063_366_688_984_5,
            0.973_906_528_517_171_7,
        ];
        let weights = [
            0.295_524_224_714_752_87,
            0.269_266_719_309_996_35,
            0.219_086_362_515_982_04,
            0.149_451_349_150_580_59,
            0.066_671_344_308_688_14,
        ];
        let (x, w) = gauss_legendre(10).unwrap();
        for k in 0..5 {
            assert_relative_eq!(x[5 + k], nodes[k], max_relative = 1e-14);
            assert_relative_eq!(x[4 - k], -nodes[k], max_relative = 1e-14);
            assert_relative_eq!(w[5 + k], weights[k], max_relative = 1e-14);
            assert_relative_eq!(w[4 - k], weights[k], max_relative = 1e-14);
        }
    }

    #[test]
    fn rules_are_symmetric_ordered_and_normalized() {
        for order in 1..=MAX_QUAD_ORDER {
            let (x, w) = gauss_legendre(order).unwrap();
            assert_eq!(x.len(), order);
            let total: f64 = w.iter().sum();
            assert_relative_eq!(total, 2.0, max_relative = 1e-14);
            for k in 0..order {
                assert!(w[k] > 0.0);
                assert!(x[k] > -1.0 && x[k] < 1.0);
                assert_abs_diff_eq!(x[k], -x[order - 1 - k], epsilon = 1e-15);
                if k > 0 {
                    assert!(x[k] > x[k - 1], "nodes must increase (order {order})");
                }
            }
        }
    }

    #[test]
    fn rule_integrates_polynomials_to_its_exactness_degree() {
        for order in 1..=MAX_QUAD_ORDER {
            let (x, w) = gauss_legendre(order).unwrap();
            for k in 0..=(2 * order - 1) {
                let quad: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(xi, wi)| wi * xi.powi(k as i32))
                    .sum();
                let exact = if k % 2 == 1 {
                    0.0
                } else {
                    2.0 / (k as f64 + 1.0)
                };
                assert_abs_diff_eq!(quad, exact, epsilon = 2e-14);
            }
        }
        // The exactness degree is tight: x^{2n} is integrated with a visible
        // error at low orders.
        for order in 1..=8 {
            let (x, w) = gauss_legendre(order).unwrap();
            let k = 2 * order;
            let quad: f64 = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| wi * xi.powi(k as i32))
                .sum();
            let exact = 2.0 / (k as f64 + 1.0);
            assert!(
                (quad - exact).abs() > 1e-8,
                "order {order} unexpectedly integrated x^{k} exactly"
            );
        }
    }

    #[test]
    fn rejects_out_of_range_orders() {
        assert_eq!(
            gauss_legendre(0),
            Err(AssemblyError::QuadratureOrderOutOfRange(0))
        );
        assert_eq!(
            gauss_legendre(31),
            Err(AssemblyError::QuadratureOrderOutOfRange(31))
        );
        assert!(matches!(
            reference_element_matrices(&BasisConstants::new(1.0, 1.0).unwrap(), 7),
            Err(AssemblyError::QuadratureOrderTooLow(7))
        ));
        assert!(matches!(
            reference_element_matrices(&BasisConstants::new(1.0, 1.0).unwrap(), 31),
            Err(AssemblyError::QuadratureOrderOutOfRange(31))
        ));
    }

    // ---------------------------------------------------------------
    // Element matrices against frozen oracles.
    // ---------------------------------------------------------------

    /// Exact cubic-limit element matrices (symbolic integration of the p → 0
    /// basis): mass / h, advection (dimensionless), diffusion · h.
    const CUBIC_MASS_OVER_H: [[f64; 4]; 4] = [
        [1.0 / 112.0, 129.0 / 2240.0, 3.0 / 112.0, 1.0 / 2240.0],
        [129.0 / 2240.0, 297.0 / 560.0, 933.0 / 2240.0, 3.0 / 112.0],
        [3.0 / 112.0, 933.0 / 2240.0, 297.0 / 560.0, 129.0 / 2240.0],
        [1.0 / 2240.0, 3.0 / 112.0, 129.0 / 2240.0, 1.0 / 112.0],
    ];
    const CUBIC_ADVECTION: [[f64; 4]; 4] = [
        [-1.0 / 32.0, -9.0 / 320.0, 9.0 / 160.0, 1.0 / 320.0],
        [-71.0 / 320.0, -15.0 / 32.0, 183.0 / 320.0, 19.0 / 160.0],
        [-19.0 / 160.0, -183.0 / 320.0, 15.0 / 32.0, 71.0 / 320.0],
        [-1.0 / 320.0, -9.0 / 160.0, 9.0 / 320.0, 1.0 / 32.0],
    ];
    const CUBIC_DIFFUSION_TIMES_H: [[f64; 4]; 4] = [
        [3.0 / 40.0, -21.0 / 160.0, 3.0 / 80.0, 3.0 / 160.0],
        [99.0 / 160.0, -33.0 / 40.0, -33.0 / 160.0, 33.0 / 80.0],
        [33.0 / 80.0, -33.0 / 160.0, -33.0 / 40.0, 99.0 / 160.0],
        [3.0 / 160.0, 3.0 / 80.0, -21.0 / 160.0, 3.0 / 40.0],
    ];

    #[test]
    fn element_matrices_match_cubic_limit_oracle() {
        for &h in &[0.1, 1.0, 50.0] {
            let cc = BasisConstants::new(1e-7 / h, h).unwrap();
            let em = reference_element_matrices(&cc, 10).unwrap();
            for j in 0..4 {
                for i in 0..4 {
                    assert_abs_diff_eq!(
                        em.mass[j][i],
                        CUBIC_MASS_OVER_H[j][i] * h,
                        epsilon = 1e-10 * h
                    );
                    assert_abs_diff_eq!(em.advection[j][i], CUBIC_ADVECTION[j][i], epsilon = 1e-10);
                    assert_abs_diff_eq!(
                        em.diffusion[j][i],
                        CUBIC_DIFFUSION_TIMES_H[j][i] / h,
                        epsilon = 1e-10 / h
                    );
                }
            }
        }
    }

    /// Frozen element matrices at p = h = 1, integrated from the raw textbook
    /// piece formulas with 50-digit adaptive quadrature.
    #[rustfmt::skip]
    const EXP_MASS_P1H1: [[f64; 4]; 4] = [
        [0.007923936850791094, 0.053843199115433942, 0.024294155532265565, 0.00037684179599390111],
        [0.053843199115433942, 0.52153749921125621, 0.40353846536422085, 0.024294155532265565],
        [0.024294155532265565, 0.40353846536422085, 0.52153749921125621, 0.053843199115433942],
        [0.00037684179599390111, 0.024294155532265565, 0.053843199115433942, 0.007923936850791094],
    ];
    #[rustfmt::skip]
    const EXP_ADVECTION_P1H1: [[f64; 4]; 4] = [
        [-0.028351307877845297, -0.027076700198276853, 0.052769190735605096, 0.0026588173405170545],
        [-0.21104641030486309, -0.4716486921221547, 0.5732232959357221, 0.10947180649129569],
        [-0.10947180649129569, -0.5732232959357221, 0.4716486921221547, 0.21104641030486309],
        [-0.0026588173405170545, -0.052769190735605096, 0.027076700198276853, 0.028351307877845297],
    ];
    #[rustfmt::skip]
    const EXP_DIFFUSION_P1H1: [[f64; 4]; 4] = [
        [0.071739719054664884, -0.12733707166036437, 0.039454986156734088, 0.016142366448965398],
        [0.61078603884277557, -0.83058874951429592, -0.17118061749973486, 0.39098332817125522],
        [0.39098332817125522, -0.17118061749973486, -0.83058874951429592, 0.61078603884277557],
        [0.016142366448965398, 0.039454986156734088, -0.12733707166036437, 0.071739719054664884],
    ];

    #[test]
    fn element_matrices_match_extended_precision_oracle_at_p1_h1() {
        let cc = BasisConstants::new(1.0, 1.0).unwrap();
        let em = reference_element_matrices(&cc, 10).unwrap();
        for j in 0..4 {
            for i in 0..4 {
                assert_abs_diff_eq!(em.mass[j][i], EXP_MASS_P1H1[j][i], epsilon = 1e-15);
                assert_abs_diff_eq!(
                    em.advection[j][i],
                    EXP_ADVECTION_P1H1[j][i],
                    epsilon = 1e-15
                );
                assert_abs_diff_eq!(
                    em.diffusion[j][i],
                    EXP_DIFFUSION_P1H1[j][i],
                    epsilon = 2e-15
                );
            }
        }
    }

    // ---------------------------------------------------------------
    // Structural identities.
    // ---------------------------------------------------------------

    #[test]
    fn element_matrices_have_reflection_symmetries() {
        // Reflecting an element end-for-end maps shape `local` to `3 − local`:
        // the mass matrix is symmetric and persymmetric, advection flips sign
        // under the double reflection, diffusion is persymmetric.
        for &(p, h) in &[(1.0, 1.0), (0.05286, 0.1), (6.8e-6, 100.0), (2.0, 4.0)] {
            let cc = BasisConstants::new(p, h).unwrap();
            let em = reference_element_matrices(&cc, 12).unwrap();
            let scale_a = 1e-14 * h;
            let scale_b = 1e-13;
            let scale_c = 1e-13 / h * (1.0 + (p * h) * (p * h));
            for j in 0..4 {
                for i in 0..4 {
                    assert_abs_diff_eq!(em.mass[j][i], em.mass[i][j], epsilon = scale_a);
                    assert_abs_diff_eq!(em.mass[j][i], em.mass[3 - j][3 - i], epsilon = scale_a);
                    assert_abs_diff_eq!(
                        em.advection[j][i],
                        -em.advection[3 - j][3 - i],
                        epsilon = scale_b
                    );
                    assert_abs_diff_eq!(
                        em.diffusion[j][i],
                        em.diffusion[3 - j][3 - i],
                        epsilon = scale_c
                    );
                }
            }
        }
    }

    #[test]
    fn advection_satisfies_integration_by_parts() {
        // ∫ φ_j φ_i′ + ∫ φ_j′ φ_i = [φ_j φ_i] at the element ends.
        for &(p, h) in &[(1.0, 1.0), (0.05286, 0.1), (6.8e-6, 100.0), (0.8, 2.5)] {
            let cc = BasisConstants::new(p, h).unwrap();
            let em = reference_element_matrices(&cc, 14).unwrap();
            for j in 0..4 {
                for i in 0..4 {
                    let boundary = cc.element_shape(j, h, 0) * cc.element_shape(i, h, 0)
                        - cc.element_shape(j, 0.0, 0) * cc.element_shape(i, 0.0, 0);
                    assert_abs_diff_eq!(
                        em.advection[j][i] + em.advection[i][j],
                        boundary,
                        epsilon = 1e-13
                    );
                }
            }
        }
    }

    #[test]
    fn diffusion_satisfies_integration_by_parts() {
        // ∫ φ_j φ_i″ = [φ_j φ_i′] − ∫ φ_j′ φ_i′; the gradient matrix is
        // computed here directly from the shapes as an independent quantity.
        for &(p, h) in &[(1.0, 1.0), (0.05286, 0.1), (6.8e-6, 100.0), (0.8, 2.5)] {
            let cc = BasisConstants::new(p, h).unwrap();
            let em = reference_element_matrices(&cc, 14).unwrap();
            let (nodes, weights) = gauss_legendre(14).unwrap();
            for j in 0..4 {
                for i in 0..4 {
                    let mut grad = 0.0;
                    for (x, w) in nodes.iter().zip(&weights) {
                        let t = 0.5 * h * (x + 1.0);
                        grad += 0.5 * h * w * cc.element_shape(j, t, 1) * cc.element_shape(i, t, 1);
                    }
                    let boundary = cc.element_shape(j, h, 0) * cc.element_shape(i, h, 1)
                        - cc.element_shape(j, 0.0, 0) * cc.element_shape(i, 0.0, 1);
                    let scale = 1.0 / h * (1.0 + (p * h) * (p * h));
                    assert_abs_diff_eq!(
                        em.diffusion[j][i],
                        boundary - grad,
                        epsilon = 1e-12 * scale
                    );
                }
            }
        }
    }

    #[test]
    fn quadrature_refinement_leaves_matrices_unchanged() {
        // At moderate tension the order-10 rule is already converged: doubling
        // the order must not move any entry beyond round-off.
        for &(p, h) in &[(1e-4, 1.0), (0.05286, 0.1), (6.8e-6, 100.0), (2.0, 1.0)] {
            let cc = BasisConstants::new(p, h).unwrap();
            let a = reference_element_matrices(&cc, 10).unwrap();
            let b = reference_element_matrices(&cc, 20).unwrap();
            let (sa, sb, sc) = (h, 1.0, 1.0 / h);
            for j in 0..4 {
                for i in 0..4 {
                    assert_abs_diff_eq!(a.mass[j][i], b.mass[j][i], epsilon = 1e-12 * sa);
                    assert_abs_diff_eq!(a.advection[j][i], b.advection[j][i], epsilon = 1e-12 * sb);
                    assert_abs_diff_eq!(a.diffusion[j][i], b.diffusion[j][i], epsilon = 1e-12 * sc);
                }
            }
        }
    }

    // ---------------------------------------------------------------
    // Global assembly.
    // ---------------------------------------------------------------

    #[test]
    fn global_matrices_match_direct_quadrature_of_basis_products() {
        // Slow oracle: integrate B_{r−1}·B_{c−1}^{(d)} element by element with
        // eval_basis, for every matrix entry of a small mesh.
        let mesh = Mesh::new(0.0, 6.0, 6).unwrap();
        let cc = BasisConstants::new(0.7, 1.0).unwrap();
        let gm = assemble_global(&mesh, &cc, 10).unwrap();
        let (nodes, weights) = gauss_legendre(10).unwrap();
        let size = mesh.n() + 3;
        for d in 0..3 {
            let got = match d {
                0 => &gm.mass,
                1 => &gm.advection,
                _ => &gm.diffusion,
            };
            for r in 0..size {
                for c in 0..size {
                    let mut want = 0.0;
                    for m in 0..mesh.n() {
                        let left = mesh.knot(m as i64);
                        for (x, w) in nodes.iter().zip(&weights) {
                            let xx = left + 0.5 * (x + 1.0);
                            want += 0.5
                                * w
                                * eval_basis(&mesh, &cc, r as i64 - 1, xx, 0)
                                * eval_basis(&mesh, &cc, c as i64 - 1, xx, d);
                        }
                    }
                    assert_abs_diff_eq!(got.get(r, c), want, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn global_mass_is_symmetric_positive_definite() {
        for &(p, h, n) in &[(1.0, 1.0, 12usize), (0.05286, 0.1, 9), (6.8e-6, 100.0, 8)] {
            let mesh = Mesh::new(0.0, h * n as f64, n).unwrap();
            let cc = BasisConstants::new(p, h).unwrap();
            let gm = assemble_global(&mesh, &cc, 10).unwrap();
            let size = n + 3;
            let dense = gm.mass.to_dense();
            for r in 0..size {
                for c in 0..size {
                    assert_abs_diff_eq!(dense[r][c], dense[c][r], epsilon = 1e-14 * h);
                }
            }
            // Cholesky succeeds exactly when the matrix is SPD.
            let mut l = vec![vec![0.0; size]; size];
            for r in 0..size {
                for c in 0..=r {
                    let mut sum = dense[r][c];
                    for k in 0..c {
                        sum -= l[r][k] * l[c][k];
                    }
                    if r == c {
                        assert!(
                            sum > 0.0,
                            "mass matrix not positive definite at leading minor {r} (p={p}, h={h})"
                        );
                        l[r][c] = sum.sqrt();
                    } else {
                        l[r][c] = sum / l[c][c];
                    }
                }
            }
        }
    }

    #[test]
    fn interior_rows_repeat_on_uniform_meshes() {
        // Away from the three boundary-affected rows at each end, every row of
        // a global matrix is the previous row shifted by one column.
        let mesh = Mesh::new(-2.0, 10.0, 12).unwrap();
        let cc = BasisConstants::new(0.3, 1.0).unwrap();
        let gm = assemble_global(&mesh, &cc, 10).unwrap();
        for mat in [&gm.mass, &gm.advection, &gm.diffusion] {
            for r in 4..11 {
                for off in -3i64..=3 {
                    let c = (r as i64 + off) as usize;
                    let c_prev = (r as i64 - 1 + off) as usize;
                    assert_abs_diff_eq!(mat.get(r, c), mat.get(r - 1, c_prev), epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn assembled_dimensions_and_bandwidth() {
        let mesh = Mesh::new(0.0, 45.0, 45).unwrap();
        let cc = BasisConstants::new(3.04e-4, 1.0).unwrap();
        let gm = assemble_global(&mesh, &cc, 8).unwrap();
        assert_eq!(gm.mass.n(), 48);
        assert_eq!(gm.mass.bandwidth(), 3);
        // Disjoint supports ⇒ exact zeros outside the seven diagonals.
        assert_eq!(gm.mass.get(0, 4), 0.0);
        assert_eq!(gm.advection.get(10, 14), 0.0);
    }
}
