//! Nelder–Mead downhill simplex minimisation.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexSettings {
    /// Maximum number of objective evaluations.
    pub max_evaluations: usize,
    /// Stop once every vertex lies within this distance (max-norm) of the best.
    pub x_tolerance: f64,
    /// ...and every vertex value lies within this of the best value.
    pub f_tolerance: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for SimplexSettings {
    fn default() -> Self {
        Self { max_evaluations: 5000, x_tolerance: 1e-8, f_tolerance: 1e-12, initial_step: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimises `f` starting from `x0`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], settings: SimplexSettings) -> SimplexResult {
    let n = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += settings.initial_step;
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| eval(p, &mut evaluations)).collect();

    let mut converged = false;
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        points = order.iter().map(|&i| points[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let x_spread = points[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&points[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let f_spread = values[1..].iter().map(|v| (v - values[0]).abs()).fold(0.0, f64::max);
        if x_spread <= settings.x_tolerance && f_spread <= settings.f_tolerance {
            converged = true;
            break;
        }
        if evaluations >= settings.max_evaluations {
            break;
        }

        let centroid: Vec<f64> =
            (0..n).map(|k| points[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64).collect();
        let along = |coef: f64| -> Vec<f64> {
            centroid.iter().zip(&points[n]).map(|(c, w)| c + coef * (c - w)).collect()
        };

        let reflected = along(REFLECT);
        let fr = eval(&reflected, &mut evaluations);
        if fr < values[0] {
            let expanded = along(REFLECT * EXPAND);
            let fe = eval(&expanded, &mut evaluations);
            if fe < fr {
                points[n] = expanded;
                values[n] = fe;
            } else {
                points[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            points[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (candidate, threshold) = if fr < values[n] {
            (along(REFLECT * CONTRACT), fr)
        } else {
            (along(-CONTRACT), values[n])
        };
        let fc = eval(&candidate, &mut evaluations);
        if fc < threshold {
            points[n] = candidate;
            values[n] = fc;
            continue;
        }
        for i in 1..=n {
            let shrunk: Vec<f64> =
                points[i].iter().zip(&points[0]).map(|(x, b)| b + SHRINK * (x - b)).collect();
            values[i] = eval(&shrunk, &mut evaluations);
            points[i] = shrunk;
        }
    }

    SimplexResult { x: points[0].clone(), value: values[0], evaluations, converged }
}
