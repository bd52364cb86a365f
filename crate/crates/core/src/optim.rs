//! Derivative-free minimization (Nelder–Mead) with optional box bounds.

/// Tuning knobs for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Stop once the spread of simplex values falls below this.
    pub f_tol: f64,
    /// ... and the simplex diameter falls below this.
    pub x_tol: f64,
    /// Edge length of the initial simplex.
    pub step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            max_iter: 2000,
            f_tol: 1e-12,
            x_tol: 1e-9,
            step: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Best objective value after each iteration.
    pub trace: Vec<f64>,
}

fn clip(x: &mut [f64], bounds: Option<&[(f64, f64)]>) {
    if let Some(b) = bounds {
        for (v, (lo, hi)) in x.iter_mut().zip(b) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

fn eval<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimize `f` from `x0`. Points are clipped into `bounds` before every
/// evaluation and NaN objective values count as `+inf`.
///
/// The returned value never exceeds `f(x0)`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    bounds: Option<&[(f64, f64)]>,
    opts: NelderMead,
) -> Minimum {
    let n = x0.len();
    let mut start = x0.to_vec();
    clip(&mut start, bounds);
    if n == 0 {
        let value = eval(f, &start);
        return Minimum {
            x: start,
            value,
            iterations: 0,
            trace: vec![value],
        };
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(f, &start);
    simplex.push((start.clone(), v0));
    for i in 0..n {
        let mut p = start.clone();
        p[i] += opts.step;
        if let Some(b) = bounds {
            if p[i] > b[i].1 {
                p[i] = start[i] - opts.step;
            }
        }
        clip(&mut p, bounds);
        let v = eval(f, &p);
        simplex.push((p, v));
    }

    let order = |s: &mut Vec<(Vec<f64>, f64)>| {
        s.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| lex_cmp(&a.0, &b.0)));
    };
    order(&mut simplex);
    let mut trace = vec![simplex[0].1];
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = if worst.is_finite() { (worst - best).abs() } else { f64::INFINITY };
        let diameter = simplex[1..]
            .iter()
            .map(|(p, _)| {
                p.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.f_tol * (1.0 + best.abs()) && diameter <= opts.x_tol {
            break;
        }
        if diameter == 0.0 {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (p, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64| {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect();
            clip(&mut p, bounds);
            p
        };

        let reflected = along(1.0);
        let fr = eval(f, &reflected);
        if fr < simplex[0].1 {
            let expanded = along(2.0);
            let fe = eval(f, &expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < simplex[n].1 {
                let p = along(0.5);
                let v = eval(f, &p);
                (p, v)
            } else {
                let p = along(-0.5);
                let v = eval(f, &p);
                (p, v)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let anchor = simplex[0].0.clone();
                for (p, v) in simplex.iter_mut().skip(1) {
                    for (x, a) in p.iter_mut().zip(&anchor) {
                        *x = a + 0.5 * (*x - a);
                    }
                    clip(p, bounds);
                    *v = eval(f, p);
                }
            }
        }
        order(&mut simplex);
        trace.push(simplex[0].1);
    }

    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        iterations,
        trace,
    }
}

/// Repeat [`nelder_mead`] from its own optimum until a restart no longer
/// improves the objective, guarding against premature simplex collapse.
pub fn nelder_mead_restarted<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    bounds: Option<&[(f64, f64)]>,
    opts: NelderMead,
    max_restarts: usize,
) -> Minimum {
    let mut best = nelder_mead(f, x0, bounds, opts);
    for _ in 0..max_restarts {
        let next = nelder_mead(f, &best.x, bounds, opts);
        let improved = next.value < best.value - opts.f_tol * (1.0 + best.value.abs());
        let mut trace = std::mem::take(&mut best.trace);
        trace.extend(next.trace.iter().map(|v| v.min(best.value)));
        let iterations = best.iterations + next.iterations;
        if next.value < best.value {
            best = next;
        }
        best.trace = trace;
        best.iterations = iterations;
        if !improved {
            break;
        }
    }
    best
}

/// Lexicographic order on parameter vectors, used to break ties.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}
