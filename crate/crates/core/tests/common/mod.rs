//! Brute-force oracle: direct evaluation of the pooling formulas, kept
//! deliberately independent of the library's implementation path. Used to
//! cross-check the estimators on small instances.

/// (estimate, se) pairs in, plain loops out.
#[derive(Debug, Clone, Copy)]
pub struct Inst {
    pub l: f64,
    pub se: f64,
}

pub fn fixed_effects(inst: &[Inst]) -> (f64, f64) {
    let mut sum_w = 0.0;
    let mut sum_wl = 0.0;
    for x in inst {
        let w = 1.0 / (x.se * x.se);
        sum_w += w;
        sum_wl += w * x.l;
    }
    (sum_wl / sum_w, (1.0 / sum_w).sqrt())
}

pub fn cochran_q(inst: &[Inst]) -> f64 {
    let (est, _) = fixed_effects(inst);
    let mut q = 0.0;
    for x in inst {
        let w = 1.0 / (x.se * x.se);
        q += w * (x.l - est) * (x.l - est);
    }
    q
}

pub fn dl_tau2(inst: &[Inst]) -> f64 {
    let q = cochran_q(inst);
    let mut sum_w = 0.0;
    let mut sum_w2 = 0.0;
    for x in inst {
        let w = 1.0 / (x.se * x.se);
        sum_w += w;
        sum_w2 += w * w;
    }
    let c = sum_w - sum_w2 / sum_w;
    let t2 = (q - (inst.len() as f64 - 1.0)) / c;
    if t2 > 0.0 {
        t2
    } else {
        0.0
    }
}

pub fn random_effects(inst: &[Inst]) -> (f64, f64) {
    let t2 = dl_tau2(inst);
    let mut sum_w = 0.0;
    let mut sum_wl = 0.0;
    for x in inst {
        let w = 1.0 / (x.se * x.se + t2);
        sum_w += w;
        sum_wl += w * x.l;
    }
    (sum_wl / sum_w, (1.0 / sum_w).sqrt())
}

pub fn ivhet(inst: &[Inst]) -> (f64, f64) {
    let (est, _) = fixed_effects(inst);
    let t2 = dl_tau2(inst);
    let mut sum_w = 0.0;
    for x in inst {
        sum_w += 1.0 / (x.se * x.se);
    }
    let mut var = 0.0;
    for x in inst {
        let wh = (1.0 / (x.se * x.se)) / sum_w;
        var += wh * wh * (x.se * x.se + t2);
    }
    (est, var.sqrt())
}
