use crate::{Error, Result};

/// A rational rotation `cos = base / hypo`, `sin = height / hypo` scaled by
/// `hypo` so that rotated integer vectors stay integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TiltParams {
    base: i64,
    height: i64,
    hypo: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl TiltParams {
    /// Triples tried on stalls, smallest hypotenuse first.
    pub const ENUMERATION: [TiltParams; 4] = [
        TiltParams {
            base: 3,
            height: 4,
            hypo: 5,
        },
        TiltParams {
            base: 5,
            height: 12,
            hypo: 13,
        },
        TiltParams {
            base: 8,
            height: 15,
            hypo: 17,
        },
        TiltParams {
            base: 7,
            height: 24,
            hypo: 25,
        },
    ];

    pub fn new(base: i64, height: i64, hypo: i64) -> Result<Self> {
        let invalid = |reason| {
            Err(Error::InvalidTilt {
                base,
                height,
                hypo,
                reason,
            })
        };
        if base <= 0 || height <= 0 || hypo <= 0 {
            return invalid("legs and hypotenuse must be positive");
        }
        if base * base + height * height != hypo * hypo {
            return invalid("not a Pythagorean triple");
        }
        if gcd(base, hypo) != 1 || gcd(height, hypo) != 1 {
            return invalid("legs must be coprime to the hypotenuse");
        }
        Ok(Self { base, height, hypo })
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    pub fn height(&self) -> i64 {
        self.height
    }

    pub fn hypo(&self) -> i64 {
        self.hypo
    }

    /// Factor by which tilting can widen a coordinate's range, used to size
    /// the phase shift: `hypo * (base + height)`.
    pub fn inflation(&self) -> i64 {
        self.hypo * (self.base + self.height)
    }
}

/// `(base w1 - height w2, height w1 + base w2)`.
pub fn tilt_freq(w: [i64; 2], tp: &TiltParams) -> [i64; 2] {
    [
        tp.base * w[0] - tp.height * w[1],
        tp.height * w[0] + tp.base * w[1],
    ]
}

/// Inverse of [`tilt_freq`]; fails off the tilted lattice.
pub fn untilt_freq(v: [i64; 2], tp: &TiltParams) -> Result<[i64; 2]> {
    let c2 = tp.hypo * tp.hypo;
    let x = tp.base * v[0] + tp.height * v[1];
    let y = -tp.height * v[0] + tp.base * v[1];
    if x % c2 != 0 || y % c2 != 0 {
        return Err(Error::NotTiltLattice { v1: v[0], v2: v[1] });
    }
    Ok([x / c2, y / c2])
}

/// Time map dual to [`tilt_freq`]: `(base t1 + height t2, -height t1 + base t2)`.
pub fn tilt_time(t: [f64; 2], tp: &TiltParams) -> [f64; 2] {
    let (b, h) = (tp.base as f64, tp.height as f64);
    [b * t[0] + h * t[1], -h * t[0] + b * t[1]]
}
