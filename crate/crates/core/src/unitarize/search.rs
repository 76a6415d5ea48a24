//! Search over the free accessory parameters for a unitarizable monodromy.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{certify, SolverConfig, UnitarityCertificate, UnitarizeError};
use crate::exact::{angle_stability_violation, check_gauss_bonnet, ConeConfiguration, Rational};
use crate::fuchsian::{monodromy_generators, solve_accessory_constraints, MonodromyRep, SchwarzianData};

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    /// Objective evaluations per seed, restarts included.
    pub max_evals: usize,
    /// Simplex diameter at which a run stops.
    pub x_tol: f64,
    /// Objective value at which a run stops.
    pub f_tol: f64,
    /// Edge length of the initial simplex; `None` scales with the data.
    pub initial_step: Option<f64>,
    /// Restarts from the best vertex with a fresh simplex.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_evals: 600, x_tol: 1e-10, f_tol: 1e-24, initial_step: None, restarts: 2 }
    }
}

/// Starting points: the first `grid` points of the lattice `{0, ±r}^d`
/// (origin first), then `random` uniform draws from `[−r, r]^d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub grid: usize,
    pub random: usize,
    pub rng_seed: u64,
    /// `None` scales with the data.
    pub radius: Option<f64>,
}

impl Default for SeedSpec {
    fn default() -> Self {
        Self { grid: 3, random: 3, rng_seed: 0, radius: None }
    }
}

impl SeedSpec {
    pub fn points(&self, dim: usize, radius: f64) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        if dim == 0 {
            out.push(Vec::new());
            return out;
        }
        // lattice points ordered by number of nonzero coordinates, then index
        let total = 3usize.saturating_pow(dim as u32);
        let mut lattice: Vec<Vec<f64>> = (0..total.min(1 << 16))
            .map(|mut k| {
                (0..dim)
                    .map(|_| {
                        let digit = k % 3;
                        k /= 3;
                        [0.0, radius, -radius][digit]
                    })
                    .collect()
            })
            .collect();
        lattice.sort_by_key(|p: &Vec<f64>| p.iter().filter(|x| **x != 0.0).count());
        out.extend(lattice.into_iter().take(self.grid));
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        for _ in 0..self.random {
            out.push((0..dim).map(|_| rng.gen_range(-radius..=radius)).collect());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub index: usize,
    pub start: Vec<C>,
    pub free: Vec<C>,
    pub defect: f64,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitarizedSolution {
    pub data: SchwarzianData,
    pub certificate: UnitarityCertificate,
    pub rep: MonodromyRep,
    /// All seeds, ordered by `(defect, index)`.
    pub seeds: Vec<SeedOutcome>,
}

fn to_complex(x: &[f64]) -> Vec<C> {
    x.chunks(2).map(|p| C::new(p[0], p[1])).collect()
}

fn from_complex(z: &[C]) -> Vec<f64> {
    z.iter().flat_map(|w| [w.re, w.im]).collect()
}

/// Nelder–Mead on `f` from `x0`; returns the best point, value and evaluation
/// count.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &NelderMeadOptions, step: f64) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> f64,
{
    let dim = x0.len();
    let count = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        count.set(count.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best = (x0.to_vec(), eval(x0));
    if dim == 0 {
        return (best.0, best.1, count.get());
    }
    let mut step = step;
    for _round in 0..=opts.restarts {
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![best.clone()];
        for k in 0..dim {
            let mut x = best.0.clone();
            x[k] += step;
            let v = eval(&x);
            simplex.push((x, v));
        }
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if simplex[0].1 <= opts.f_tol || diameter <= opts.x_tol || count.get() >= opts.max_evals {
                break;
            }
            let worst = simplex[dim].clone();
            let centroid: Vec<f64> =
                (0..dim).map(|k| simplex[..dim].iter().map(|(x, _)| x[k]).sum::<f64>() / dim as f64).collect();
            let along = |t: f64| -> Vec<f64> { (0..dim).map(|k| centroid[k] + t * (worst.0[k] - centroid[k])).collect() };
            let xr = along(-1.0);
            let fr = eval(&xr);
            if fr < simplex[0].1 {
                let xe = along(-2.0);
                let fe = eval(&xe);
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
            } else {
                let (xc, fc) = if fr < worst.1 {
                    let xc = along(-0.5);
                    let fc = eval(&xc);
                    (xc, fc)
                } else {
                    let xc = along(0.5);
                    let fc = eval(&xc);
                    (xc, fc)
                };
                if fc < worst.1.min(fr) {
                    simplex[dim] = (xc, fc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for v in simplex.iter_mut().skip(1) {
                        v.0 = (0..dim).map(|k| x0[k] + 0.5 * (v.0[k] - x0[k])).collect();
                        v.1 = eval(&v.0);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let improved = simplex[0].1 < best.1;
        best = simplex[0].clone();
        if best.1 <= opts.f_tol || count.get() >= opts.max_evals {
            break;
        }
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if !improved && _round > 0 {
            break;
        }
        step = (10.0 * diameter).max(opts.x_tol * 10.0).min(step);
    }
    (best.0, best.1, count.get())
}

/// Typical size of the accessory parameters: `max (1 − α²) / d_min`.
fn parameter_scale(poles: &[C], angles: &[f64]) -> f64 {
    let d = crate::fuchsian::schwarzian::min_separation(poles);
    let a = angles.iter().map(|a| 1.0 - a * a).fold(0.0, f64::max);
    (a / d).max(1e-3)
}

/// Admissibility of the angles alone: Gauss–Bonnet and the angle stability
/// inequalities.
pub fn check_admissible(angles: &[Rational]) -> Result<(), UnitarizeError> {
    let config = ConeConfiguration::with_integer_points(angles.to_vec())
        .map_err(|e| UnitarizeError::Inadmissible(e.to_string()))?;
    if !check_gauss_bonnet(&config) {
        return Err(UnitarizeError::Inadmissible("Gauss-Bonnet inequality fails".into()));
    }
    if let Some(i) = angle_stability_violation(&config) {
        return Err(UnitarizeError::Inadmissible(format!("angle inequality fails at point {i}")));
    }
    Ok(())
}

/// Finds free accessory parameters with unitarizable monodromy.
pub fn solve_unitarizing_parameters(
    poles: &[C],
    angles: &[Rational],
    cfg: &SolverConfig,
) -> Result<UnitarizedSolution, UnitarizeError> {
    check_admissible(angles)?;
    let angles_f: Vec<f64> = angles.iter().map(crate::exact::gauss::rat_to_f64).collect();
    let n = poles.len();
    let dim = 2 * n.saturating_sub(3);
    let scale = parameter_scale(poles, &angles_f);
    let radius = cfg.seeds.radius.unwrap_or(scale);
    let step = cfg.nelder_mead.initial_step.unwrap_or(0.25 * scale);

    let objective = |x: &[f64]| -> f64 {
        let Ok(data) = solve_accessory_constraints(poles, &angles_f, &to_complex(x)) else {
            return f64::INFINITY;
        };
        let Ok((rep, _)) = monodromy_generators(&data, cfg.basepoint, &cfg.transport) else {
            return f64::INFINITY;
        };
        certify(&rep, &cfg.minimize, cfg.delta_accept).map_or(f64::INFINITY, |c| c.defect)
    };

    let starts = if dim == 0 { vec![Vec::new()] } else { cfg.seeds.points(dim, radius) };
    let mut seeds: Vec<SeedOutcome> = starts
        .par_iter()
        .enumerate()
        .map(|(index, x0)| {
            let (x, defect, evaluations) = nelder_mead(objective, x0, &cfg.nelder_mead, step);
            SeedOutcome { index, start: to_complex(x0), free: to_complex(&x), defect, evaluations }
        })
        .collect();
    seeds.sort_by(|a, b| a.defect.total_cmp(&b.defect).then(a.index.cmp(&b.index)));

    let best = &seeds[0];
    let data = solve_accessory_constraints(poles, &angles_f, &best.free)?;
    let (rep, _) = monodromy_generators(&data, cfg.basepoint, &cfg.transport)?;
    let certificate = certify(&rep, &cfg.minimize, cfg.delta_accept)?;
    if !certificate.accepted() {
        return Err(UnitarizeError::NotUnitarizable { best: certificate.defect, accept: cfg.delta_accept, seeds });
    }
    Ok(UnitarizedSolution { data, certificate, rep, seeds })
}

/// Free parameters of a solution as a flat real vector.
pub fn free_vector(data: &SchwarzianData) -> Vec<f64> {
    from_complex(data.free_parameters())
}
