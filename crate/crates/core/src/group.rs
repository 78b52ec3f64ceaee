//! Ambient abelian groups and their canonical element encoding.
//!
//! Every element is stored as a single `i64`:
//!
//! * `F2n`: an `n`-bit mask, group law XOR;
//! * `Fpn`: coordinates packed little-endian in base `p` (coordinate 0 has weight 1);
//! * `Zmod`: the residue in `[0, m)`;
//! * `Zint`: the integer itself, with overflow reported as an error.
//!
//! For the finite variants the encoding is also the element's index in `[0, |G|)`,
//! which the dense transforms and lookup tables rely on.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Canonical group element. Only meaningful together with its [`GroupSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub i64);

/// Largest finite group order we accept.
pub const MAX_ORDER: u64 = 1 << 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    /// The vector space F_2^n, `1 <= n <= 63`.
    F2n { n: u32 },
    /// The vector space F_p^n for an odd prime `p` with `p^n <= 2^63`.
    Fpn { p: u64, n: u32 },
    /// The cyclic group Z/mZ.
    Zmod { m: u64 },
    /// The integers.
    Zint,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl GroupSpec {
    pub fn f2n(n: u32) -> Result<Self> {
        if !(1..=63).contains(&n) {
            return Err(Error::InvalidGroup(format!("F2n dimension must be in 1..=63, got {n}")));
        }
        Ok(GroupSpec::F2n { n })
    }

    pub fn fpn(p: u64, n: u32) -> Result<Self> {
        if p == 2 {
            return Err(Error::InvalidGroup("use F2n for p = 2".into()));
        }
        if !is_prime(p) {
            return Err(Error::InvalidGroup(format!("{p} is not an odd prime")));
        }
        if n == 0 {
            return Err(Error::InvalidGroup("Fpn dimension must be at least 1".into()));
        }
        match p.checked_pow(n) {
            Some(order) if order <= MAX_ORDER => Ok(GroupSpec::Fpn { p, n }),
            _ => Err(Error::InvalidGroup(format!("{p}^{n} exceeds 2^63"))),
        }
    }

    pub fn zmod(m: u64) -> Result<Self> {
        if m == 0 || m > MAX_ORDER {
            return Err(Error::InvalidGroup(format!("modulus must be in 1..=2^63, got {m}")));
        }
        Ok(GroupSpec::Zmod { m })
    }

    /// Group order, or `None` for the integers.
    pub fn order(&self) -> Option<u64> {
        match *self {
            GroupSpec::F2n { n } => Some(1u64 << n),
            GroupSpec::Fpn { p, n } => Some(p.pow(n)),
            GroupSpec::Zmod { m } => Some(m),
            GroupSpec::Zint => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, GroupSpec::Zint)
    }

    pub fn identity(&self) -> Elem {
        Elem(0)
    }

    pub fn is_valid(&self, a: Elem) -> bool {
        match self.order() {
            Some(order) => a.0 >= 0 && (a.0 as u64) < order,
            None => true,
        }
    }

    pub fn check(&self, a: Elem) -> Result<Elem> {
        if self.is_valid(a) {
            Ok(a)
        } else {
            Err(Error::InvalidElement { group: *self, value: a.0 })
        }
    }

    pub fn add(&self, a: Elem, b: Elem) -> Result<Elem> {
        self.check(a)?;
        self.check(b)?;
        self.add_valid(a, b)
    }

    pub fn neg(&self, a: Elem) -> Result<Elem> {
        self.check(a)?;
        self.neg_valid(a)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Result<Elem> {
        self.check(a)?;
        self.check(b)?;
        self.sub_valid(a, b)
    }

    /// Addition for operands already known to be valid.
    #[inline]
    pub(crate) fn add_valid(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(match *self {
            GroupSpec::F2n { .. } => Elem(a.0 ^ b.0),
            GroupSpec::Zmod { m } => {
                let s = a.0 as u64 + b.0 as u64;
                Elem(if s >= m { s - m } else { s } as i64)
            }
            GroupSpec::Fpn { p, n } => Elem(digitwise(p, n, a.0 as u64, b.0 as u64, |x, y| {
                let s = x + y;
                if s >= p {
                    s - p
                } else {
                    s
                }
            }) as i64),
            GroupSpec::Zint => Elem(a.0.checked_add(b.0).ok_or(Error::Overflow)?),
        })
    }

    #[inline]
    pub(crate) fn neg_valid(&self, a: Elem) -> Result<Elem> {
        Ok(match *self {
            GroupSpec::F2n { .. } => a,
            GroupSpec::Zmod { m } => Elem(if a.0 == 0 { 0 } else { (m - a.0 as u64) as i64 }),
            GroupSpec::Fpn { p, n } => {
                Elem(digitwise(p, n, a.0 as u64, 0, |x, _| if x == 0 { 0 } else { p - x }) as i64)
            }
            GroupSpec::Zint => Elem(a.0.checked_neg().ok_or(Error::Overflow)?),
        })
    }

    #[inline]
    pub(crate) fn sub_valid(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(match *self {
            GroupSpec::F2n { .. } => Elem(a.0 ^ b.0),
            GroupSpec::Zmod { m } => {
                let (x, y) = (a.0 as u64, b.0 as u64);
                Elem(if x >= y { x - y } else { m - (y - x) } as i64)
            }
            GroupSpec::Fpn { p, n } => {
                Elem(digitwise(p, n, a.0 as u64, b.0 as u64, |x, y| if x >= y { x - y } else { p - (y - x) }) as i64)
            }
            GroupSpec::Zint => Elem(a.0.checked_sub(b.0).ok_or(Error::Overflow)?),
        })
    }

    /// Coordinates of an `Fpn` element, coordinate 0 first.
    pub fn coordinates(&self, a: Elem) -> Result<Vec<u64>> {
        self.check(a)?;
        match *self {
            GroupSpec::Fpn { p, n } => {
                let mut x = a.0 as u64;
                Ok((0..n)
                    .map(|_| {
                        let d = x % p;
                        x /= p;
                        d
                    })
                    .collect())
            }
            GroupSpec::F2n { n } => Ok((0..n).map(|i| (a.0 as u64 >> i) & 1).collect()),
            _ => Ok(vec![a.0 as u64]),
        }
    }

    /// Packs `Fpn`/`F2n` coordinates (coordinate 0 first) into an element.
    pub fn from_coordinates(&self, coords: &[u64]) -> Result<Elem> {
        let (p, n) = match *self {
            GroupSpec::Fpn { p, n } => (p, n),
            GroupSpec::F2n { n } => (2, n),
            _ => return Err(Error::InvalidGroup("coordinates only exist for F2n/Fpn".into())),
        };
        if coords.len() != n as usize {
            return Err(Error::Parse(format!("expected {n} coordinates, got {}", coords.len())));
        }
        let mut acc = 0u64;
        for &c in coords.iter().rev() {
            if c >= p {
                return Err(Error::Parse(format!("coordinate {c} out of range for p = {p}")));
            }
            acc = acc * p + c;
        }
        Ok(Elem(acc as i64))
    }

    /// Parses an element in this group's text grammar.
    pub fn parse_elem(&self, text: &str) -> Result<Elem> {
        let text = text.trim();
        let bad = || Error::Parse(format!("malformed element {text:?} for group {self}"));
        let elem = match *self {
            GroupSpec::F2n { n } => {
                if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
                    if hex.is_empty() {
                        return Err(bad());
                    }
                    let v = u64::from_str_radix(hex, 16).map_err(|_| bad())?;
                    if n < 64 && v >> n != 0 {
                        return Err(Error::Parse(format!("{text} has more than {n} bits")));
                    }
                    Elem(v as i64)
                } else {
                    if text.len() != n as usize || !text.bytes().all(|b| b == b'0' || b == b'1') {
                        return Err(bad());
                    }
                    Elem(u64::from_str_radix(text, 2).map_err(|_| bad())? as i64)
                }
            }
            GroupSpec::Fpn { .. } => {
                let coords =
                    text.split(',').map(|c| c.trim().parse::<u64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
                self.from_coordinates(&coords)?
            }
            GroupSpec::Zmod { m } => {
                let v: u64 = text.parse().map_err(|_| bad())?;
                if v >= m {
                    return Err(Error::Parse(format!("residue {v} out of range for modulus {m}")));
                }
                Elem(v as i64)
            }
            GroupSpec::Zint => Elem(text.parse().map_err(|_| bad())?),
        };
        Ok(elem)
    }

    /// Canonical text form; `parse_elem(format_elem(a)) == a`.
    pub fn format_elem(&self, a: Elem) -> String {
        match *self {
            GroupSpec::F2n { .. } => format!("{:#x}", a.0),
            GroupSpec::Fpn { .. } => self
                .coordinates(a)
                .map(|c| c.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
                .unwrap_or_else(|_| format!("<invalid {}>", a.0)),
            GroupSpec::Zmod { .. } | GroupSpec::Zint => a.0.to_string(),
        }
    }
}

#[inline]
fn digitwise(p: u64, n: u32, mut a: u64, mut b: u64, op: impl Fn(u64, u64) -> u64) -> u64 {
    let mut out = 0u64;
    let mut weight = 1u64;
    for i in 0..n {
        out += op(a % p, b % p) * weight;
        a /= p;
        b /= p;
        if i + 1 < n {
            weight *= p;
        }
    }
    out
}

/// Formats as the set-file header body, e.g. `f2 n=12`, `fp p=3 n=2`, `zmod m=7`, `z`.
impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupSpec::F2n { n } => write!(f, "f2 n={n}"),
            GroupSpec::Fpn { p, n } => write!(f, "fp p={p} n={n}"),
            GroupSpec::Zmod { m } => write!(f, "zmod m={m}"),
            GroupSpec::Zint => write!(f, "z"),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut words = s.split_whitespace();
        let kind = words.next().ok_or_else(|| Error::Parse("empty group descriptor".into()))?;
        let mut n = None;
        let mut p = None;
        let mut m = None;
        for word in words {
            let (key, value) =
                word.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got {word:?}")))?;
            let value: u64 = value.parse().map_err(|_| Error::Parse(format!("bad number in {word:?}")))?;
            let slot = match key {
                "n" => &mut n,
                "p" => &mut p,
                "m" => &mut m,
                _ => return Err(Error::Parse(format!("unknown group parameter {key:?}"))),
            };
            if slot.replace(value).is_some() {
                return Err(Error::Parse(format!("duplicate group parameter {key:?}")));
            }
        }
        let need = |v: Option<u64>, name: &str| v.ok_or_else(|| Error::Parse(format!("group {kind} requires {name}=")));
        let no_extra = |extra: &[(Option<u64>, &str)]| -> Result<()> {
            for (v, name) in extra {
                if v.is_some() {
                    return Err(Error::Parse(format!("group {kind} does not take {name}=")));
                }
            }
            Ok(())
        };
        let dim = |v: u64| u32::try_from(v).map_err(|_| Error::InvalidGroup(format!("dimension {v} too large")));
        match kind {
            "f2" => {
                no_extra(&[(p, "p"), (m, "m")])?;
                GroupSpec::f2n(dim(need(n, "n")?)?)
            }
            "fp" => {
                no_extra(&[(m, "m")])?;
                GroupSpec::fpn(need(p, "p")?, dim(need(n, "n")?)?)
            }
            "zmod" => {
                no_extra(&[(n, "n"), (p, "p")])?;
                GroupSpec::zmod(need(m, "m")?)
            }
            "z" => {
                no_extra(&[(n, "n"), (p, "p"), (m, "m")])?;
                Ok(GroupSpec::Zint)
            }
            other => Err(Error::Parse(format!("unknown group kind {other:?}"))),
        }
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
