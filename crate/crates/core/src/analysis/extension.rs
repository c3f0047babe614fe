//! Numerical check of the ghost-penalty extension estimate
//! `C |grad^l v|^2_{Omega_i^T} <= |grad^l v|^2_{base} + sum_F w_F g_F(v, v)`.
//!
//! The largest ratio of the two sides over the discrete space is a
//! generalized eigenvalue; it is approached from below by power iteration
//! from random starts.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Side as FaerSide;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{assemble_ghost_matrix, weight_strategy, Discretization, GhostKind, Region};
use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::fem::FieldRole;
use crate::geometry::Side;
use crate::sparse::SparseMatrix;

/// Domain of the bulk term on the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionBase {
    /// Uncut cells of the side only, as in the estimate.
    Interior,
    /// The physical subdomain, cut cells included.
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionParams {
    pub side: Side,
    /// Polynomial order of the tested space: 2 or 1 on the fluid side
    /// (velocity or pressure space), 1 or 2 on the solid side.
    pub order: usize,
    /// 0 compares values, 1 gradients.
    pub l: usize,
    pub gamma: f64,
    pub w_max: f64,
    pub base: ExtensionBase,
    pub samples: usize,
    pub power_steps: usize,
    pub seed: u64,
}

impl Default for ExtensionParams {
    fn default() -> Self {
        Self {
            side: Side::Fluid,
            order: 2,
            l: 1,
            gamma: 1.0,
            w_max: 1.0,
            base: ExtensionBase::Interior,
            samples: 100,
            power_steps: 10,
            seed: 1,
        }
    }
}

/// Scalar Gram matrix of `l`-th derivatives of `role` over `region`.
pub fn gram_matrix(disc: &Discretization, role: FieldRole, region: Region, l: usize) -> SparseMatrix {
    let dm = disc.dofmap(role);
    let nloc = dm.dofs_per_cell();
    let mut trip = Vec::new();
    let mut local = vec![0.0; nloc * nloc];
    for cell in disc.region_cells(region) {
        let rule = disc.bulk_rule(cell, region);
        if rule.is_empty() {
            continue;
        }
        local.iter_mut().for_each(|v| *v = 0.0);
        let map = dm.cell_map(cell);
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            let t = dm.basis().tabulate(map.to_reference(*x), map.h);
            for a in 0..nloc {
                for b in 0..nloc {
                    local[a * nloc + b] += w * if l == 0 {
                        t.values[a] * t.values[b]
                    } else {
                        t.grads[a][0] * t.grads[b][0] + t.grads[a][1] * t.grads[b][1]
                    };
                }
            }
        }
        let dofs = dm.cell_dofs(cell);
        for a in 0..nloc {
            for b in 0..nloc {
                trip.push((dofs[a] as usize, dofs[b] as usize, local[a * nloc + b]));
            }
        }
    }
    SparseMatrix::from_triplets(dm.n_dofs(), dm.n_dofs(), &trip)
}

/// The two quadratic forms of the estimate on one mesh.
pub struct ExtensionProblem {
    /// `|grad^l v|^2` on the computational domain.
    pub lhs: SparseMatrix,
    /// Base bulk term plus weighted ghost penalty.
    pub rhs: SparseMatrix,
}

fn role_for(side: Side, order: usize) -> Result<(FieldRole, Option<usize>)> {
    match (side, order) {
        (Side::Fluid, 2) => Ok((FieldRole::FluidVelocity, None)),
        (Side::Fluid, 1) => Ok((FieldRole::Pressure, None)),
        (Side::Solid, 1 | 2) => Ok((FieldRole::SolidVelocity, Some(order))),
        _ => Err(Error::InvalidParameter {
            name: "order".into(),
            message: format!("no {order}-th order space on the {} side", side.label()),
        }),
    }
}

impl ExtensionProblem {
    pub fn new(base: &SimulationConfig, n: usize, params: &ExtensionParams) -> Result<Self> {
        if params.l > 1 {
            return Err(Error::InvalidParameter {
                name: "l".into(),
                message: "only values (0) and gradients (1) are compared".into(),
            });
        }
        let (role, m_s) = role_for(params.side, params.order)?;
        let mut cfg = base.clone();
        cfg.n = n;
        cfg.stab.w_max = params.w_max;
        if let Some(m) = m_s {
            cfg.m_s = m;
        }
        let disc = Discretization::new(&cfg)?;
        let side = params.side;
        let lhs = gram_matrix(&disc, role, Region::Computational(side), params.l);
        let base_region = match params.base {
            ExtensionBase::Interior => Region::Interior(side),
            ExtensionBase::Physical => Region::Physical(side),
        };
        let mut rhs = gram_matrix(&disc, role, base_region, params.l);
        if params.gamma != 0.0 {
            let weight = weight_strategy(cfg.resolved_ghost_weight(), params.w_max)?;
            let kind = if params.l == 0 { GhostKind::Value } else { GhostKind::Gradient };
            let ghost = assemble_ghost_matrix(
                disc.mesh(),
                disc.topology(),
                disc.dofmap(role),
                side,
                kind,
                params.gamma,
                weight.as_ref(),
                cfg.quad_points,
            );
            rhs = sum(&rhs, &ghost);
        }
        if params.l == 1 {
            // constants lie in the kernel of both forms; pinning one dof
            // removes them without changing the supremum
            let keep: Vec<usize> = (1..lhs.nrows()).collect();
            return Ok(Self {
                lhs: lhs.submatrix(&keep),
                rhs: rhs.submatrix(&keep),
            });
        }
        Ok(Self { lhs, rhs })
    }

    pub fn dim(&self) -> usize {
        self.lhs.nrows()
    }

    /// `x^T lhs x / x^T rhs x`.
    pub fn ratio(&self, x: &[f64]) -> f64 {
        self.lhs.bilinear(x, x) / self.rhs.bilinear(x, x)
    }

    /// Largest ratio found by power iteration from `samples` random starts.
    /// Infinite when the right-hand form is not positive definite.
    pub fn max_ratio(&self, samples: usize, power_steps: usize, seed: u64) -> Result<f64> {
        let n = self.dim();
        let trip: Vec<Triplet<usize, usize, f64>> = (0..n)
            .flat_map(|r| {
                let (cols, vals) = self.rhs.row(r);
                cols.iter()
                    .zip(vals)
                    .map(move |(&c, &v)| Triplet::new(r, c as usize, v))
                    .collect::<Vec<_>>()
            })
            .collect();
        let b = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
            .map_err(|e| Error::Backend(format!("{e:?}")))?;
        let Ok(llt) = b.sp_cholesky(FaerSide::Lower) else {
            return Ok(f64::INFINITY);
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = 0.0f64;
        for _ in 0..samples {
            let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            best = best.max(self.ratio(&x));
            for _ in 0..power_steps {
                let ax = self.lhs.matvec(&x);
                let rhs = faer::Col::<f64>::from_fn(n, |i| ax[i]);
                let y = llt.solve(&rhs);
                let norm = (0..n).map(|i| y[i] * y[i]).sum::<f64>().sqrt();
                if !(norm > 0.0) || !norm.is_finite() {
                    break;
                }
                x = (0..n).map(|i| y[i] / norm).collect();
                best = best.max(self.ratio(&x));
            }
        }
        Ok(best)
    }
}

fn sum(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let mut trip = Vec::with_capacity(a.nnz() + b.nnz());
    for m in [a, b] {
        for r in 0..m.nrows() {
            let (cols, vals) = m.row(r);
            trip.extend(cols.iter().zip(vals).map(|(&c, &v)| (r, c as usize, v)));
        }
    }
    SparseMatrix::from_triplets(a.nrows(), a.ncols(), &trip)
}

/// Largest ratio per mesh level.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionReport {
    pub params: ExtensionParams,
    pub levels: Vec<usize>,
    pub ratios: Vec<f64>,
}

impl ExtensionReport {
    /// `max / min` of the ratios across levels.
    pub fn spread(&self) -> f64 {
        if self.ratios.iter().any(|r| r.is_infinite()) {
            return f64::INFINITY;
        }
        let max = self.ratios.iter().fold(0.0f64, |m, &r| m.max(r));
        let min = self.ratios.iter().fold(f64::INFINITY, |m, &r| m.min(r));
        max / min
    }

    /// Ratio of the finest to the coarsest level.
    pub fn growth(&self) -> f64 {
        match (self.ratios.first(), self.ratios.last()) {
            (Some(a), Some(b)) => b / a,
            _ => f64::NAN,
        }
    }
}

pub fn verify_ghost_extension(base: &SimulationConfig, levels: &[usize], params: &ExtensionParams) -> Result<ExtensionReport> {
    let ratios = levels
        .iter()
        .map(|&n| ExtensionProblem::new(base, n, params)?.max_ratio(params.samples, params.power_steps, params.seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtensionReport {
        params: *params,
        levels: levels.to_vec(),
        ratios,
    })
}
