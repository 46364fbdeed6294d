//! One-dimensional maximization of concave functions on a closed interval.

/// Default bracket width at which golden-section search stops.
pub const ARG_TOLERANCE: f64 = 1e-9;

/// A maximizer this close to an end of the search interval counts as
/// landing on that end.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
    pub at_lower: bool,
    pub at_upper: bool,
}

impl Maximum {
    pub fn on_boundary(&self) -> bool {
        self.at_lower || self.at_upper
    }
}

/// Golden-section search for the maximum of a concave `f` on `[lo, hi]`.
///
/// After the bracket shrinks below `tol`, both endpoints are evaluated
/// explicitly. An endpoint whose value ties the interior candidate wins.
pub fn maximize_concave<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Maximum {
    assert!(lo <= hi, "empty search interval [{lo}, {hi}]");
    let finish = |arg: f64, value: f64| Maximum {
        arg,
        value,
        at_lower: arg - lo <= BOUNDARY_TOLERANCE,
        at_upper: hi - arg <= BOUNDARY_TOLERANCE,
    };
    if hi - lo <= tol {
        let (a, b) = (f(lo), f(hi));
        return if b > a { finish(hi, b) } else { finish(lo, a) };
    }

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd > best.1 {
                best = (d, fd);
            }
        }
    }
    let mid = 0.5 * (a + b);
    let fmid = f(mid);
    if fmid >= best.1 {
        best = (mid, fmid);
    }

    let tie = 1e-14 * best.1.abs().max(1.0);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo >= best.1 - tie && f_lo >= f_hi {
        finish(lo, f_lo)
    } else if f_hi >= best.1 - tie {
        finish(hi, f_hi)
    } else {
        finish(best.0, best.1)
    }
}
