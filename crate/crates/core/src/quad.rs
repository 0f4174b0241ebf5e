//! Panel quadrature built on the 7-15 Gauss–Kronrod rule.
//!
//! The engines in this crate construct explicit panel decompositions
//! (dyadic grading into singular endpoints, oscillation-resolving uniform
//! cells) and apply the rule per panel; the Kronrod/Gauss difference gives
//! a per-panel error estimate that is accumulated into the result.

/// Positive Kronrod abscissae of the 7-15 rule (the node 0 first).
const XGK: [f64; 8] = [
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
];
const WGK: [f64; 8] = [
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
];
/// Gauss weights of the embedded 7-point rule, for nodes 0, ±x2, ±x4, ±x6.
const WG: [f64; 4] = [
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
];

/// Integral value with an accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn zero() -> Self {
        Estimate {
            value: 0.0,
            error: 0.0,
        }
    }

    pub fn add(&mut self, other: Estimate) {
        self.value += other.value;
        self.error += other.error;
    }
}

/// One application of the 7-15 Gauss–Kronrod rule on `[a, b]`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(mid);
    let mut kronrod = WGK[0] * f_center;
    let mut gauss = WG[0] * f_center;

    for i in 1..8 {
        let dx = half * XGK[i];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 0 {
            gauss += WG[i / 2] * pair;
        }
    }

    let value = half * kronrod;
    Estimate {
        value,
        error: (half * (kronrod - gauss)).abs(),
    }
}

/// Apply the rule on each consecutive pair of `edges` and sum.
pub fn integrate_edges<F: Fn(f64) -> f64>(f: &F, edges: &[f64]) -> Estimate {
    let mut total = Estimate::zero();
    for w in edges.windows(2) {
        if w[1] > w[0] {
            total.add(gk15(f, w[0], w[1]));
        }
    }
    total
}

/// Edges that grade dyadically from an interval endpoint: `depth` panels
/// shrinking geometrically toward `singular_end`, the rest of the interval
/// left as a single leading panel boundary.
pub fn graded_edges(lo: f64, hi: f64, singular_at_lo: bool, depth: u32) -> Vec<f64> {
    let width = hi - lo;
    let mut edges = Vec::with_capacity(depth as usize + 2);
    if singular_at_lo {
        edges.push(lo);
        for k in (1..=depth).rev() {
            edges.push(lo + width * 0.5f64.powi(k as i32));
        }
        edges.push(hi);
    } else {
        edges.push(lo);
        for k in 1..=depth {
            edges.push(hi - width * 0.5f64.powi(k as i32));
        }
        edges.push(hi);
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    edges.dedup();
    edges
}

/// Sort, deduplicate, and clip a set of panel edges to `[lo, hi]`.
pub fn normalize_edges(mut edges: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    edges.push(lo);
    edges.push(hi);
    edges.retain(|x| x.is_finite() && *x >= lo && *x <= hi);
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() <= f64::EPSILON * a.abs().max(1e-300));
    edges
}

/// Insert uniform subdivisions so that no panel is wider than `max_width`.
pub fn cap_panel_width(edges: &[f64], max_width: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(edges.len());
    for w in edges.windows(2) {
        out.push(w[0]);
        let width = w[1] - w[0];
        if width > max_width {
            let n = (width / max_width).ceil() as usize;
            for j in 1..n {
                out.push(w[0] + width * j as f64 / n as f64);
            }
        }
    }
    if let Some(&last) = edges.last() {
        out.push(last);
    }
    out
}

/// Globally adaptive bisection on `[a, b]` to the requested tolerances.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_depth: u32,
) -> Estimate {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: Estimate,
        tol: f64,
        depth: u32,
    ) -> Estimate {
        if whole.error <= tol || depth == 0 {
            return whole;
        }
        let mid = 0.5 * (a + b);
        let left = gk15(f, a, mid);
        let right = gk15(f, mid, b);
        let mut out = recurse(f, a, mid, left, tol * 0.5, depth - 1);
        out.add(recurse(f, mid, b, right, tol * 0.5, depth - 1));
        out
    }
    let first = gk15(f, a, b);
    let tol = abs_tol.max(rel_tol * first.value.abs());
    recurse(f, a, b, first, tol, max_depth)
}
