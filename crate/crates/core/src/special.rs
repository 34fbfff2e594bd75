//! Special functions and quadrature rules used by the kernel backends.

use crate::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of |Γ(x)|.
pub fn ln_gamma<T: Real>(x: T) -> T {
    if x < T::c(0.5) {
        let pi = T::PI();
        (pi / (pi * x).sin().abs()).ln() - ln_gamma(T::one() - x)
    } else {
        let x = x - T::one();
        let mut a = T::c(LANCZOS[0]);
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            a = a + T::c(c) / (x + T::n(i));
        }
        let t = x + T::c(LANCZOS_G + 0.5);
        T::c(0.5) * (T::c(2.0) * T::PI()).ln() + (x + T::c(0.5)) * t.ln() - t + a.ln()
    }
}

pub fn gamma<T: Real>(x: T) -> T {
    if x < T::c(0.5) {
        T::PI() / ((T::PI() * x).sin() * gamma(T::one() - x))
    } else {
        ln_gamma(x).exp()
    }
}

pub fn beta<T: Real>(a: T, b: T) -> T {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

fn beta_cf<T: Real>(a: T, b: T, x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let eps = T::epsilon();
    let one = T::one();
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;
    for m in 1..400 {
        let m = T::n(m);
        let m2 = m + m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let del = d * c;
        h = h * del;
        if (del - one).abs() < eps {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a,b) together with its complement 1 − I_x(a,b).
///
/// The caller passes `y = 1 − x` separately so that both tails keep full
/// relative accuracy when x is close to 0 or 1.
pub fn inc_beta_pair<T: Real>(a: T, b: T, x: T, y: T) -> (T, T) {
    let zero = T::zero();
    let one = T::one();
    if x <= zero {
        return (zero, one);
    }
    if y <= zero {
        return (one, zero);
    }
    let ln_front = a * x.ln() + b * y.ln() - (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b));
    let front = ln_front.exp();
    if x < (a + one) / (a + b + T::c(2.0)) {
        let i = front * beta_cf(a, b, x) / a;
        (i, one - i)
    } else {
        let j = front * beta_cf(b, a, y) / b;
        (one - j, j)
    }
}

pub fn inc_beta<T: Real>(a: T, b: T, x: T) -> T {
    inc_beta_pair(a, b, x, T::one() - x).0
}

const BERNOULLI_2J: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Hurwitz zeta ζ(s, a) = Σ_{k≥0} (k + a)^{−s} for real s ≠ 1 and a > 0,
/// analytically continued to s < 1 through Euler–Maclaurin summation.
pub fn hurwitz_zeta<T: Real>(s: T, a: T) -> T {
    let shift = T::c(16.0);
    let mut sum = T::zero();
    let mut q = a;
    while q < shift {
        sum = sum + q.powf(-s);
        q = q + T::one();
    }
    let one = T::one();
    sum = sum + q.powf(one - s) / (s - one) + T::c(0.5) * q.powf(-s);
    // Σ B_{2j}/(2j)! · s(s+1)…(s+2j−2) · q^{−s−2j+1}
    let mut rising = s;
    let mut fact = T::c(2.0);
    let mut qpow = q.powf(-s - one);
    let q2 = q * q;
    for (j, &b) in BERNOULLI_2J.iter().enumerate() {
        sum = sum + T::c(b) / fact * rising * qpow;
        let k = T::n(2 * j + 1);
        rising = rising * (s + k) * (s + k + one);
        fact = fact * (k + T::c(2.0)) * (k + T::c(3.0));
        qpow = qpow / q2;
    }
    sum
}

/// Σ_{k≥1} cos(2πkx)/k^σ for x ∈ (0,1) and 0 < σ < 1, via the Hurwitz
/// functional equation.
pub fn periodic_cosine_sum<T: Real>(x: T, sigma: T) -> T {
    let one = T::one();
    cosine_prefactor(sigma)
        * (hurwitz_zeta(one - sigma, x) + hurwitz_zeta(one - sigma, one - x))
}

/// (2π)^σ / (4 Γ(σ) cos(πσ/2)), the constant in front of the Hurwitz pair.
pub fn cosine_prefactor<T: Real>(sigma: T) -> T {
    let two_pi = T::c(2.0) * T::PI();
    two_pi.powf(sigma) / (T::c(4.0) * gamma(sigma) * (T::FRAC_PI_2() * sigma).cos())
}

/// Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                if n == 1 {
                    p0 = 1.0;
                    p1 = z;
                }
                dp = nf * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = T::c(-z);
            nodes[n - 1 - i] = T::c(z);
            weights[i] = T::c(w);
            weights[n - 1 - i] = T::c(w);
        }
        GaussRule { nodes, weights }
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = T::c(0.5) * (b - a);
        let mid = T::c(0.5) * (a + b);
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + w * f(mid + half * x);
        }
        acc * half
    }
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = T::c(0.5) * (b - a);
    let mid = T::c(0.5) * (a + b);
    let fc = f(mid);
    let mut k = fc * T::c(GK_WK[7]);
    let mut g = fc * T::c(GK_WG[3]);
    for i in 0..7 {
        let dx = half * T::c(GK_X[i]);
        let s = f(mid - dx) + f(mid + dx);
        k = k + T::c(GK_WK[i]) * s;
        if i % 2 == 1 {
            g = g + T::c(GK_WG[i / 2]) * s;
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over [a, b].
///
/// Returns the estimate and the accumulated error estimate.
pub fn adaptive_integrate<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, tol: T) -> (T, T) {
    fn rec<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T, tol: T, whole: (T, T), depth: u32) -> (T, T) {
        let (v, e) = whole;
        if e <= tol || depth == 0 {
            return (v, e);
        }
        let m = T::c(0.5) * (a + b);
        let l = gk15(f, a, m);
        let r = gk15(f, m, b);
        let half = T::c(0.5) * tol;
        let (lv, le) = rec(f, a, m, half, l, depth - 1);
        let (rv, re) = rec(f, m, b, half, r, depth - 1);
        (lv + rv, le + re)
    }
    let whole = gk15(&mut f, a, b);
    rec(&mut f, a, b, tol, whole, 40)
}
