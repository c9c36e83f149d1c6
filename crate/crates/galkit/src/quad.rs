//! Small quadrature toolkit backing the one-dimensional Fourier-inversion
//! density oracle: adaptive Simpson, a fixed 15-point Gauss-Legendre
//! panel, and Wynn's epsilon algorithm for accelerating the oscillatory
//! tail series.

pub(crate) const GL15_NODES: [f64; 15] = [
    -0.98799251802048542849,
    -0.93727339240070590431,
    -0.84820658341042721620,
    -0.72441773136017004742,
    -0.57097217260853884754,
    -0.39415134707756336990,
    -0.20119409399743452230,
    0.0,
    0.20119409399743452230,
    0.39415134707756336990,
    0.57097217260853884754,
    0.72441773136017004742,
    0.84820658341042721620,
    0.93727339240070590431,
    0.98799251802048542849,
];

pub(crate) const GL15_WEIGHTS: [f64; 15] = [
    0.030753241996117268355,
    0.070366047488108124709,
    0.107159220467171935010,
    0.139570677926154314450,
    0.166269205816993933550,
    0.186161000015562211030,
    0.198431485327111576460,
    0.202578241925561272880,
    0.198431485327111576460,
    0.186161000015562211030,
    0.166269205816993933550,
    0.139570677926154314450,
    0.107159220467171935010,
    0.070366047488108124709,
    0.030753241996117268355,
];

pub(crate) fn gauss_legendre_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in GL15_NODES.iter().zip(GL15_WEIGHTS.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Adaptive Simpson with a local error estimate of `(S2 - S1)/15` and a
/// width-proportional error budget (total error <= `tol`). Returns `None`
/// when the recursion depth budget is exhausted before the tolerance is
/// met.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Option<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let density = tol / (b - a);
    simpson_step(f, a, b, fa, fm, fb, whole, density, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol_density: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol_density * (b - a) {
        return Some(left + right + err / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, tol_density, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, tol_density, depth - 1)?;
    Some(l + r)
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums:
/// `eps_{k+1}^{(i)} = eps_{k-1}^{(i+1)} + 1 / (eps_k^{(i+1)} - eps_k^{(i)})`.
/// Even columns carry the extrapolated limits. Returns the deepest
/// finite even-column estimate and the spread of the last two such
/// estimates as an error gauge.
pub(crate) fn wynn_epsilon(partial_sums: &[f64]) -> (f64, f64) {
    let n = partial_sums.len();
    debug_assert!(n >= 3);
    let mut prev: Vec<f64> = vec![0.0; n + 1]; // eps_{-1}
    let mut cur: Vec<f64> = partial_sums.to_vec(); // eps_0
    let mut best = cur[n - 1];
    let mut prev_best = cur[n - 2];
    let mut col = 0usize;

    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        let mut ok = true;
        for i in 0..cur.len() - 1 {
            let denom = cur[i + 1] - cur[i];
            if denom == 0.0 {
                ok = false;
                break;
            }
            let v = prev[i + 1] + 1.0 / denom;
            if !v.is_finite() {
                ok = false;
                break;
            }
            next.push(v);
        }
        if !ok {
            break;
        }
        prev = std::mem::take(&mut cur);
        cur = next;
        col += 1;
        if col % 2 == 0 {
            prev_best = best;
            best = *cur.last().expect("non-empty epsilon column");
        }
    }
    (best, (best - prev_best).abs())
}
