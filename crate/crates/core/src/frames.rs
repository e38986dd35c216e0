//! A global family of unitary matrices `A(q)` with `A(q) e_1 = q` over
//! `q ∈ S^n`, built from the trivialization of `TS^n ⊗ C` given by the
//! Lagrangian immersion `(x, y) -> (1 + iy) x` of `S^n` into `C^n`.

use std::collections::HashMap;

use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::gaussian;

type C64 = Complex<f64>;

const UNIT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryFrame {
    pub q: Vec<f64>,
    pub matrix: DMatrix<C64>,
    /// `|A* A - I|_F`
    pub unitarity_defect: f64,
    /// `|A e_1 - q|`
    pub basepoint_defect: f64,
}

/// Plain-array form of a frame for external inspection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameDump {
    pub q: Vec<f64>,
    /// Rows of `[re, im]` pairs.
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub unitarity_defect: f64,
    pub basepoint_defect: f64,
}

impl UnitaryFrame {
    pub fn dump(&self) -> FrameDump {
        let m = &self.matrix;
        FrameDump {
            q: self.q.clone(),
            matrix: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect(),
            unitarity_defect: self.unitarity_defect,
            basepoint_defect: self.basepoint_defect,
        }
    }
}

/// The frame at `q`: the preimages of the standard basis of `C^n` under the
/// complexified differential, placed after `q` and orthonormalized by
/// modified Gram–Schmidt (two passes) with `q` kept first.
pub fn sphere_unitary_frame(n: usize, q: &[f64]) -> Result<UnitaryFrame> {
    if n == 0 {
        return Err(Error::InvalidParameter("frames need n >= 1".into()));
    }
    if q.len() != n + 1 {
        return Err(Error::Dimension { expected: n + 1, found: q.len() });
    }
    if q.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("frame base point"));
    }
    let norm = q.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidParameter(format!("frame base point must be a unit vector, |q| = {norm}")));
    }
    let dim = n + 1;
    let y = q[n];
    // rows 0..n: the differential [(1 + iy) I | i x]; last row: q^T
    let k = DMatrix::from_fn(dim, dim, |i, j| {
        if i == n {
            C64::new(q[j], 0.0)
        } else if j == n {
            C64::new(0.0, q[i])
        } else if i == j {
            C64::new(1.0, y)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let rhs = DMatrix::from_fn(dim, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let xi = k.lu().solve(&rhs).ok_or_else(|| Error::RankDeficient { coords: q.to_vec(), ratio: 0.0 })?;

    let mut a = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        a[(i, 0)] = C64::new(q[i], 0.0);
    }
    for j in 0..n {
        a.set_column(j + 1, &xi.column(j));
    }
    for j in 1..dim {
        for _ in 0..2 {
            for i in 0..j {
                let proj: C64 = (0..dim).map(|r| a[(r, i)].conj() * a[(r, j)]).sum();
                for r in 0..dim {
                    let v = a[(r, i)];
                    a[(r, j)] -= proj * v;
                }
            }
        }
        let len = (0..dim).map(|r| a[(r, j)].norm_sqr()).sum::<f64>().sqrt();
        if !(len > 1e-12) {
            return Err(Error::RankDeficient { coords: q.to_vec(), ratio: len });
        }
        for r in 0..dim {
            a[(r, j)] /= C64::new(len, 0.0);
        }
    }

    let gram = a.adjoint() * &a;
    let unitarity_defect = (gram - DMatrix::<C64>::identity(dim, dim)).norm();
    let basepoint_defect = (0..dim).map(|r| (a[(r, 0)] - C64::new(q[r], 0.0)).norm_sqr()).sum::<f64>().sqrt();
    Ok(UnitaryFrame { q: q.to_vec(), matrix: a, unitarity_defect, basepoint_defect })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameGrid {
    /// Subdivided icosahedron on `S^2`; pairs are the mesh edges.
    Icosphere { depth: u32 },
    /// Equally spaced points on `S^1`; pairs are neighbours.
    Circle { samples: usize },
    /// Random points paired with a point at geodesic distance `distance`.
    RandomPairs { count: usize, distance: f64, seed: u64 },
}

impl FrameGrid {
    fn refined(&self) -> FrameGrid {
        match self {
            FrameGrid::Icosphere { depth } => FrameGrid::Icosphere { depth: depth + 1 },
            FrameGrid::Circle { samples } => FrameGrid::Circle { samples: samples * 2 },
            FrameGrid::RandomPairs { count, distance, seed } => {
                FrameGrid::RandomPairs { count: *count, distance: distance / 2.0, seed: *seed }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridLevel {
    pub grid: FrameGrid,
    pub pairs: usize,
    pub max_unitarity_defect: f64,
    pub max_basepoint_defect: f64,
    /// `max |A(q) - A(q')|_F / |q - q'|` over the pairs.
    pub modulus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameFamilyReport {
    pub n: usize,
    /// The requested grid followed by two refinements.
    pub levels: Vec<GridLevel>,
    /// Relative change of the modulus between consecutive levels.
    pub drift: Vec<f64>,
    pub residuals_ok: bool,
    pub stable: bool,
}

impl FrameFamilyReport {
    pub fn passed(&self) -> bool {
        self.residuals_ok && self.stable
    }
}

fn icosphere(depth: u32) -> (Vec<[f64; 3]>, Vec<(usize, usize)>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let unit = |v: [f64; 3]| {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    };
    verts.iter_mut().for_each(|v| *v = unit(*v));
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..depth {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(unit([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let mut edges: Vec<(usize, usize)> = faces
        .iter()
        .flat_map(|[a, b, c]| [(*a, *b), (*b, *c), (*c, *a)])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    (verts, edges)
}

/// Haar-distributed point on `S^n`.
pub fn random_sphere_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..=n).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    v.iter().map(|c| c / norm).collect()
}

fn grid_pairs(n: usize, grid: &FrameGrid) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    match grid {
        FrameGrid::Icosphere { depth } => {
            if n != 2 {
                return Err(Error::InvalidParameter(format!("icosphere grids cover S^2, not S^{n}")));
            }
            let (verts, edges) = icosphere(*depth);
            Ok(edges.into_iter().map(|(a, b)| (verts[a].to_vec(), verts[b].to_vec())).collect())
        }
        FrameGrid::Circle { samples } => {
            if n != 1 {
                return Err(Error::InvalidParameter(format!("circle grids cover S^1, not S^{n}")));
            }
            if *samples < 3 {
                return Err(Error::InvalidParameter("circle grid needs at least 3 samples".into()));
            }
            let pt = |i: usize| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / *samples as f64;
                vec![th.cos(), th.sin()]
            };
            Ok((0..*samples).map(|i| (pt(i), pt((i + 1) % samples))).collect())
        }
        FrameGrid::RandomPairs { count, distance, seed } => {
            if !(*distance > 0.0) {
                return Err(Error::InvalidParameter(format!("pair distance must be positive, got {distance}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok((0..*count)
                .map(|_| {
                    let q = random_sphere_point(n, &mut rng);
                    let mut u: Vec<f64> = (0..=n).map(|_| gaussian(&mut rng)).collect();
                    let d: f64 = u.iter().zip(&q).map(|(a, b)| a * b).sum();
                    u.iter_mut().zip(&q).for_each(|(a, b)| *a -= d * b);
                    let un = u.iter().map(|c| c * c).sum::<f64>().sqrt();
                    let (s, c) = distance.sin_cos();
                    let q2: Vec<f64> = q.iter().zip(&u).map(|(a, b)| c * a + s * b / un).collect();
                    (q, q2)
                })
                .collect())
        }
    }
}

fn level(n: usize, grid: &FrameGrid) -> Result<GridLevel> {
    let pairs = grid_pairs(n, grid)?;
    let stats: Vec<(f64, f64, f64)> = pairs
        .par_iter()
        .map(|(p, q)| {
            let a = sphere_unitary_frame(n, p)?;
            let b = sphere_unitary_frame(n, q)?;
            let dist = p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            let ratio = (&a.matrix - &b.matrix).norm() / dist;
            Ok((
                a.unitarity_defect.max(b.unitarity_defect),
                a.basepoint_defect.max(b.basepoint_defect),
                ratio,
            ))
        })
        .collect::<Result<_>>()?;
    let fold = |f: fn(&(f64, f64, f64)) -> f64| stats.iter().map(f).fold(0.0f64, f64::max);
    Ok(GridLevel {
        grid: grid.clone(),
        pairs: pairs.len(),
        max_unitarity_defect: fold(|s| s.0),
        max_basepoint_defect: fold(|s| s.1),
        modulus: fold(|s| s.2),
    })
}

/// Residuals and the discrete continuity modulus of the family on `grid`
/// and on two successive refinements of it.
pub fn verify_frame_family(n: usize, grid: &FrameGrid, tol: f64) -> Result<FrameFamilyReport> {
    let g1 = grid.refined();
    let g2 = g1.refined();
    let levels = vec![level(n, grid)?, level(n, &g1)?, level(n, &g2)?];
    let drift: Vec<f64> = levels.windows(2).map(|w| (w[1].modulus - w[0].modulus).abs() / w[0].modulus).collect();
    let residuals_ok = levels.iter().all(|l| l.max_unitarity_defect <= tol && l.max_basepoint_defect <= tol);
    let stable = levels.iter().all(|l| l.modulus.is_finite()) && drift.iter().all(|d| *d < 0.1);
    Ok(FrameFamilyReport { n, levels, drift, residuals_ok, stable })
}
