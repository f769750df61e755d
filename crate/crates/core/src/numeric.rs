//! Small numerical helpers: adaptive quadrature and compensated summation.

/// Adaptive Simpson quadrature with Richardson refinement. Subdivision is
/// bounded by depth and by a global frame budget, so badly scaled inputs
/// degrade in accuracy instead of hanging.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    struct Frame {
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(&f, a, fa, b, fb);
    let mut total = 0.0;
    let mut budget: u64 = 4_000_000;
    let mut stack = vec![Frame {
        a,
        fa,
        b,
        fb,
        whole,
        m,
        fm,
        tol,
        depth: 0,
    }];
    while let Some(fr) = stack.pop() {
        let (left, lm, flm) = simpson(&f, fr.a, fr.fa, fr.m, fr.fm);
        let (right, rm, frm) = simpson(&f, fr.m, fr.fm, fr.b, fr.fb);
        let delta = left + right - fr.whole;
        budget = budget.saturating_sub(1);
        if fr.depth > 48 || budget == 0 || delta.abs() <= 15.0 * fr.tol {
            total += left + right + delta / 15.0;
        } else {
            stack.push(Frame {
                a: fr.a,
                fa: fr.fa,
                b: fr.m,
                fb: fr.fm,
                whole: left,
                m: lm,
                fm: flm,
                tol: fr.tol / 2.0,
                depth: fr.depth + 1,
            });
            stack.push(Frame {
                a: fr.m,
                fa: fr.fm,
                b: fr.b,
                fb: fr.fb,
                whole: right,
                m: rm,
                fm: frm,
                tol: fr.tol / 2.0,
                depth: fr.depth + 1,
            });
        }
    }
    total
}

/// Adaptive quadrature over `[a, b]` with `0 < a < b` after the substitution
/// `x = e^u`; the right tool for slowly decaying tails over many decades.
pub fn integrate_log<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    assert!(a > 0.0 && b > a);
    integrate(|u| {
        let x = u.exp();
        f(x) * x
    }, a.ln(), b.ln(), tol)
}

/// Neumaier compensated accumulator; deterministic and order-stable enough
/// for long coordinate walks.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn new(x: f64) -> Self {
        Kahan { sum: x, c: 0.0 }
    }
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }
    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_known_integrals() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-10);
        assert!((v - 9.0).abs() < 1e-9);
        let v = integrate(|x| (-x).exp(), 0.0, 50.0, 1e-10);
        assert!((v - 1.0).abs() < 1e-8);
        let v = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-10);
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn kahan_beats_naive() {
        let mut k = Kahan::default();
        let mut naive = 0.0f64;
        for _ in 0..1_000_000 {
            k.add(0.1);
            naive += 0.1;
        }
        assert!((k.value() - 100_000.0).abs() < 1e-7);
        let _ = naive;
    }
}
