//! `var:lo:hi:points[:log]` parameter sweeps.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// `d³/a_p³`.
    InversePStrength,
    /// `a_p³/d³`.
    PStrength,
    /// `d/a_s`.
    InverseSStrength,
    /// `a_s/d`.
    SStrength,
    /// Signed well depth `U` in `ħω` (negative is attractive).
    WellDepth,
    /// `ℰ` in `ħω_z`.
    Energy,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::InversePStrength => "apvol-inv",
            SweepVariable::PStrength => "apvol",
            SweepVariable::InverseSStrength => "as-inv",
            SweepVariable::SStrength => "as",
            SweepVariable::WellDepth => "depth",
            SweepVariable::Energy => "energy",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "apvol-inv" => SweepVariable::InversePStrength,
            "apvol" => SweepVariable::PStrength,
            "as-inv" => SweepVariable::InverseSStrength,
            "as" => SweepVariable::SStrength,
            "depth" => SweepVariable::WellDepth,
            "energy" => SweepVariable::Energy,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == self.points - 1 {
                    return self.hi;
                }
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.lo + (self.hi - self.lo) * t,
                    Scale::Log => self.lo * (self.hi / self.lo).powf(t),
                }
            })
            .collect()
    }
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(format!(
                "sweep '{s}' is not of the form var:lo:hi:points[:log]"
            ));
        }
        let variable = SweepVariable::parse(parts[0]).ok_or_else(|| {
            format!(
                "unknown sweep variable '{}' (expected apvol-inv, apvol, as-inv, as, depth or energy)",
                parts[0]
            )
        })?;
        let num = |t: &str| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("'{t}' is not a finite number"))
        };
        let lo = num(parts[1])?;
        let hi = num(parts[2])?;
        let points: usize = parts[3]
            .parse()
            .map_err(|_| format!("'{}' is not a point count", parts[3]))?;
        let scale = match parts.get(4) {
            None | Some(&"lin") => Scale::Linear,
            Some(&"log") => Scale::Log,
            Some(other) => return Err(format!("unknown scale '{other}' (expected lin or log)")),
        };
        // a single point is allowed only as a degenerate range
        if points == 0 || (points == 1 && lo != hi) {
            return Err("a sweep needs points >= 2, or points = 1 with lo = hi".into());
        }
        if points >= 2 && lo >= hi {
            return Err(format!("sweep needs lo < hi (got {lo} and {hi})"));
        }
        if scale == Scale::Log && (lo == 0.0 || hi == 0.0 || lo.signum() != hi.signum()) {
            return Err("log sweeps need nonzero bounds of the same sign".into());
        }
        Ok(SweepSpec {
            variable,
            lo,
            hi,
            points,
            scale,
        })
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}",
            self.variable.name(),
            self.lo,
            self.hi,
            self.points
        )?;
        if self.scale == Scale::Log {
            write!(f, ":log")?;
        }
        Ok(())
    }
}

/// `lo:hi` energy window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("window '{s}' is not of the form lo:hi"))?;
        let lo: f64 = a.parse().map_err(|_| format!("'{a}' is not a number"))?;
        let hi: f64 = b.parse().map_err(|_| format!("'{b}' is not a number"))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("window needs finite lo < hi (got {lo} and {hi})"));
        }
        Ok(Window { lo, hi })
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let s: SweepSpec = "apvol-inv:-30:30:121".parse().unwrap();
        assert_eq!(s.variable, SweepVariable::InversePStrength);
        let v = s.values();
        assert_eq!(v.len(), 121);
        assert_eq!((v[0], v[60], v[120]), (-30.0, 0.0, 30.0));
        assert_eq!(s.to_string().parse::<SweepSpec>().unwrap(), s);

        let l: SweepSpec = "apvol:0.1:10:3:log".parse().unwrap();
        let v = l.values();
        assert!((v[1] - 1.0).abs() < 1e-15);
        assert_eq!(l.to_string(), "apvol:0.1:10:3:log");
    }

    #[test]
    fn single_point() {
        let s: SweepSpec = "as-inv:0:0:1".parse().unwrap();
        assert_eq!(s.values(), vec![0.0]);
        assert!("as-inv:0:1:1".parse::<SweepSpec>().is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in [
            "apvol:1:0:5",
            "apvol:0:1:0",
            "nope:0:1:3",
            "apvol:0:1",
            "apvol:-1:1:3:log",
            "apvol:0:x:3",
            "apvol:0:1:3:cubic",
        ] {
            assert!(bad.parse::<SweepSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn windows() {
        let w: Window = "-4:6".parse().unwrap();
        assert_eq!((w.lo, w.hi), (-4.0, 6.0));
        assert_eq!(w.to_string(), "-4:6");
        assert!("6:-4".parse::<Window>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn display_round_trips(lo in -1e3f64..1e3, span in 1e-3f64..1e3, points in 2usize..500) {
            let s = SweepSpec {
                variable: SweepVariable::WellDepth,
                lo,
                hi: lo + span,
                points,
                scale: Scale::Linear,
            };
            let back: SweepSpec = s.to_string().parse().unwrap();
            proptest::prop_assert_eq!(back, s);
            let v = back.values();
            proptest::prop_assert_eq!(v.len(), points);
            proptest::prop_assert!(v.windows(2).all(|p| p[0] < p[1]));
        }
    }
}
