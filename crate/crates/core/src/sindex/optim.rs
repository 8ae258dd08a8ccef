//! Nelder-Mead simplex search and the hyperspherical parameterization used to
//! keep index vectors on the unit sphere.

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub initial_step: f64,
    pub max_iter: usize,
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            initial_step: 0.3,
            max_iter: 400,
            f_tol: 1e-10,
            x_tol: 1e-7,
        }
    }
}

/// Minimizes `f` from `start`. Non-finite values are treated as `+inf`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    opts: &SimplexOptions,
) -> (Vec<f64>, f64) {
    let dim = start.len();
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    if dim == 0 {
        let v = eval(start);
        return (start.to_vec(), v);
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), eval(start)));
    for k in 0..dim {
        let mut x = start.to_vec();
        x[k] += opts.initial_step;
        let v = eval(&x);
        simplex.push((x, v));
    }

    for _ in 0..opts.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let spread = simplex
            .iter()
            .skip(1)
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (worst - best).abs() <= opts.f_tol * (1.0 + best.abs()) && spread < opts.x_tol {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = along(-1.0);
        let fr = eval(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(-2.0);
            let fe = eval(&expanded);
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst {
            let x = along(-0.5);
            let v = eval(&x);
            (x, v)
        } else {
            let x = along(0.5);
            let v = eval(&x);
            (x, v)
        };
        if fc < worst.min(fr) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        // shrink toward the best vertex
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for (x, a) in vertex.0.iter_mut().zip(&anchor) {
                *x = a + 0.5 * (*x - a);
            }
            vertex.1 = eval(&vertex.0);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// Maps `d - 1` angles to a unit vector in `R^d`.
pub fn angles_to_unit(angles: &[f64]) -> Vec<f64> {
    let d = angles.len() + 1;
    let mut out = Vec::with_capacity(d);
    let mut sin_prod = 1.0;
    for &theta in angles {
        out.push(sin_prod * theta.cos());
        sin_prod *= theta.sin();
    }
    out.push(sin_prod);
    out
}

/// Inverse of [`angles_to_unit`] for a unit vector.
pub fn unit_to_angles(v: &[f64]) -> Vec<f64> {
    let d = v.len();
    if d < 2 {
        return Vec::new();
    }
    let mut angles = Vec::with_capacity(d - 1);
    for k in 0..d - 2 {
        let tail = v[k + 1..].iter().map(|x| x * x).sum::<f64>().sqrt();
        angles.push(tail.atan2(v[k]));
    }
    angles.push(v[d - 1].atan2(v[d - 2]));
    angles
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic() {
        let (x, v) = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
            &SimplexOptions::default(),
        );
        assert!(v < 1e-10);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 2.0).abs() < 1e-4);
    }

    #[test]
    fn one_dimensional() {
        let (x, _) = nelder_mead(|x| (x[0] - 0.7).abs(), &[3.0], &SimplexOptions::default());
        assert!((x[0] - 0.7).abs() < 1e-6);
    }

    #[test]
    fn sphere_round_trip() {
        for v in [
            vec![0.6, 0.8],
            vec![-0.6, 0.8],
            vec![0.5, -0.5, 0.5, 0.5],
            vec![0.0, 0.0, 1.0],
        ] {
            let u = angles_to_unit(&unit_to_angles(&v));
            for (a, b) in u.iter().zip(&v) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        let u = angles_to_unit(&[0.3, -1.2, 2.0]);
        assert!((u.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
