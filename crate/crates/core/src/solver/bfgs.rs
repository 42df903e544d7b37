//! BFGS with a strong-Wolfe line search.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_inf: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

struct Evaluator<'a, F> {
    f: &'a mut F,
    count: usize,
    best: (Vec<f64>, f64, f64),
}

impl<F: FnMut(&[f64]) -> (f64, Vec<f64>)> Evaluator<'_, F> {
    fn eval(&mut self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        self.count += 1;
        let (v, g) = (self.f)(x.as_slice());
        let ginf = g.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        if v < self.best.1 {
            self.best = (x.as_slice().to_vec(), v, ginf);
        }
        (v, DVector::from_vec(g))
    }
}

struct LinePoint {
    alpha: f64,
    f: f64,
    g: DVector<f64>,
    dphi: f64,
}

fn interpolate(lo: &LinePoint, hi: &LinePoint) -> f64 {
    // Minimizer of the quadratic through φ(lo), φ'(lo), φ(hi), kept inside the bracket.
    let d = hi.alpha - lo.alpha;
    let denom = 2.0 * (hi.f - lo.f - lo.dphi * d);
    let mut a = if denom.abs() > 1e-300 {
        lo.alpha - lo.dphi * d * d / denom
    } else {
        lo.alpha + 0.5 * d
    };
    let (a_min, a_max) = if d > 0.0 {
        (lo.alpha + 0.1 * d, hi.alpha - 0.1 * d)
    } else {
        (hi.alpha - 0.1 * d, lo.alpha + 0.1 * d)
    };
    if !a.is_finite() || a < a_min || a > a_max {
        a = lo.alpha + 0.5 * d;
    }
    a
}

fn line_search<F: FnMut(&[f64]) -> (f64, Vec<f64>)>(
    ev: &mut Evaluator<F>,
    x: &DVector<f64>,
    f0: f64,
    g0: &DVector<f64>,
    p: &DVector<f64>,
    alpha_init: f64,
) -> Option<LinePoint> {
    let dphi0 = g0.dot(p);
    let probe = |ev: &mut Evaluator<F>, alpha: f64| {
        let (f, g) = ev.eval(&(x + p * alpha));
        let dphi = g.dot(p);
        LinePoint { alpha, f, g, dphi }
    };
    let zoom = |ev: &mut Evaluator<F>, mut lo: LinePoint, mut hi: LinePoint| -> Option<LinePoint> {
        for _ in 0..60 {
            if (hi.alpha - lo.alpha).abs() < 1e-16 * lo.alpha.abs().max(1.0) {
                break;
            }
            let a = interpolate(&lo, &hi);
            let pt = probe(ev, a);
            if pt.f > f0 + C1 * a * dphi0 || pt.f >= lo.f {
                hi = pt;
            } else {
                if pt.dphi.abs() <= -C2 * dphi0 {
                    return Some(pt);
                }
                if pt.dphi * (hi.alpha - lo.alpha) >= 0.0 {
                    hi = lo;
                }
                lo = pt;
            }
        }
        // Accept a sufficient-decrease point if the curvature test cannot be met
        // within floating-point resolution.
        if lo.alpha > 0.0 && lo.f < f0 {
            return Some(lo);
        }
        None
    };

    let mut prev = LinePoint {
        alpha: 0.0,
        f: f0,
        g: g0.clone(),
        dphi: dphi0,
    };
    let mut alpha = alpha_init;
    for i in 0..40 {
        let pt = probe(ev, alpha);
        if pt.f > f0 + C1 * alpha * dphi0 || (i > 0 && pt.f >= prev.f) {
            return zoom(ev, prev, pt);
        }
        if pt.dphi.abs() <= -C2 * dphi0 {
            return Some(pt);
        }
        if pt.dphi >= 0.0 {
            return zoom(ev, pt, prev);
        }
        prev = pt;
        alpha *= 2.0;
    }
    None
}

/// Minimize `f` from `x0`. The callback returns the value and gradient.
/// Stops when `‖∇f‖_∞ ≤ tol` or after `max_iter` iterations.
pub fn bfgs_minimize<F>(mut f: F, x0: &[f64], tol: f64, max_iter: usize) -> Result<BfgsResult>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut ev = Evaluator {
        f: &mut f,
        count: 0,
        best: (x0.to_vec(), f64::INFINITY, f64::INFINITY),
    };
    let mut x = DVector::from_column_slice(x0);
    if max_iter == 0 || n == 0 {
        let (fx, g) = ev.eval(&x);
        return Ok(BfgsResult {
            x: x0.to_vec(),
            f: fx,
            grad_inf: g.amax(),
            iterations: 0,
            evaluations: ev.count,
        });
    }
    let (mut fx, mut g) = ev.eval(&x);
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut first = true;
    for iter in 0..max_iter {
        let ginf = g.amax();
        if ginf <= tol {
            return Ok(BfgsResult {
                x: x.as_slice().to_vec(),
                f: fx,
                grad_inf: ginf,
                iterations: iter,
                evaluations: ev.count,
            });
        }
        let mut p = -(&hinv * &g);
        if p.dot(&g) >= 0.0 {
            hinv = DMatrix::identity(n, n);
            p = -g.clone();
        }
        let alpha0 = if first { (1.0 / ginf).min(1.0) } else { 1.0 };
        let Some(pt) = line_search(&mut ev, &x, fx, &g, &p, alpha0) else {
            return Err(Error::LineSearch {
                iterations: iter,
                best_point: ev.best.0.clone(),
                best_value: ev.best.1,
                best_grad_norm: ev.best.2,
            });
        };
        let s = &p * pt.alpha;
        let y = &pt.g - &g;
        let sy = s.dot(&y);
        x += &s;
        fx = pt.f;
        g = pt.g;
        if sy > 1e-300 {
            if first {
                hinv *= sy / y.dot(&y);
            }
            let hy = &hinv * &y;
            let coef = (sy + y.dot(&hy)) / (sy * sy);
            hinv.ger(coef, &s, &s, 1.0);
            hinv.ger(-1.0 / sy, &hy, &s, 1.0);
            hinv.ger(-1.0 / sy, &s, &hy, 1.0);
        }
        first = false;
    }
    Ok(BfgsResult {
        x: x.as_slice().to_vec(),
        f: fx,
        grad_inf: g.amax(),
        iterations: max_iter,
        evaluations: ev.count,
    })
}
