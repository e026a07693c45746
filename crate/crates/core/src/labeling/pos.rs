use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertical {
    Top,
    Center,
    Bottom,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Horizontal {
    Left,
    Center,
    Right,
}

/// Two-character psfrag alignment code, vertical first (`tc`, `Br`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PosCode {
    pub vertical: Vertical,
    pub horizontal: Horizontal,
}

impl PosCode {
    pub const fn new(vertical: Vertical, horizontal: Horizontal) -> Self {
        Self { vertical, horizontal }
    }

    /// Box bottom, centered horizontally: the alignment used when nothing
    /// better is known.
    pub const FALLBACK: PosCode = PosCode::new(Vertical::Bottom, Horizontal::Center);

    pub fn all() -> impl Iterator<Item = PosCode> {
        [Vertical::Top, Vertical::Center, Vertical::Bottom, Vertical::Baseline]
            .into_iter()
            .flat_map(|v| {
                [Horizontal::Left, Horizontal::Center, Horizontal::Right]
                    .into_iter()
                    .map(move |h| PosCode::new(v, h))
            })
    }
}

impl fmt::Display for PosCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.vertical {
            Vertical::Top => 't',
            Vertical::Center => 'c',
            Vertical::Bottom => 'b',
            Vertical::Baseline => 'B',
        };
        let h = match self.horizontal {
            Horizontal::Left => 'l',
            Horizontal::Center => 'c',
            Horizontal::Right => 'r',
        };
        write!(f, "{v}{h}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid position code `{0}`: expected one of t/c/b/B followed by one of l/c/r")]
pub struct PosCodeError(pub String);

impl FromStr for PosCode {
    type Err = PosCodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PosCodeError(s.to_string());
        let mut chars = s.chars();
        let (Some(v), Some(h), None) = (chars.next(), chars.next(), chars.next()) else {
            return Err(err());
        };
        let vertical = match v {
            't' => Vertical::Top,
            'c' => Vertical::Center,
            'b' => Vertical::Bottom,
            'B' => Vertical::Baseline,
            _ => return Err(err()),
        };
        let horizontal = match h {
            'l' => Horizontal::Left,
            'c' => Horizontal::Center,
            'r' => Horizontal::Right,
            _ => return Err(err()),
        };
        Ok(PosCode { vertical, horizontal })
    }
}

/// Alignment code for a text anchor. Never produces the baseline code.
pub fn pos_from_anchor(anchor: (f64, f64)) -> PosCode {
    let (ax, ay) = anchor;
    let horizontal = if ax < -0.5 {
        Horizontal::Left
    } else if ax > 0.5 {
        Horizontal::Right
    } else {
        Horizontal::Center
    };
    let vertical = if ay > 0.5 {
        Vertical::Top
    } else if ay < -0.5 {
        Vertical::Bottom
    } else {
        Vertical::Center
    };
    PosCode { vertical, horizontal }
}
