//! Element names. Base atoms come from input documents; gadget points are
//! produced by the construction and carry the level and the prime interval
//! they were inserted into, so blocks built at different places never share
//! an element.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Base(String),
    Gadget(Box<GadgetTag>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GadgetTag {
    /// Name of the index the gadget was built at.
    pub level: String,
    pub lower: Element,
    pub upper: Element,
    pub point: GadgetPoint,
}

/// Position inside the doubled Boolean lattice. Sets hold names of
/// join-irreducible elements, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GadgetPoint {
    /// `<X, {}>` with `X` nonempty; `X = 1` is the shared middle.
    LowerCopy(Vec<String>),
    /// `<1, Y>` with `Y` a nonempty proper subset.
    UpperCopy(Vec<String>),
    Filler,
}

impl Element {
    pub fn base(name: impl Into<String>) -> Self {
        Element::Base(name.into())
    }

    pub fn gadget(level: impl Into<String>, lower: Element, upper: Element, point: GadgetPoint) -> Self {
        Element::Gadget(Box::new(GadgetTag { level: level.into(), lower, upper, point }))
    }

    pub fn as_base(&self) -> Option<&str> {
        match self {
            Element::Base(s) => Some(s),
            Element::Gadget(_) => None,
        }
    }

    pub fn level(&self) -> Option<&str> {
        match self {
            Element::Base(_) => None,
            Element::Gadget(g) => Some(&g.level),
        }
    }
}

impl From<&str> for Element {
    fn from(s: &str) -> Self {
        Element::Base(s.into())
    }
}

fn write_set(f: &mut fmt::Formatter<'_>, set: &[String]) -> fmt::Result {
    f.write_str("{")?;
    for (k, s) in set.iter().enumerate() {
        if k > 0 {
            f.write_str(",")?;
        }
        f.write_str(s)?;
    }
    f.write_str("}")
}

impl fmt::Display for GadgetPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GadgetPoint::LowerCopy(x) => {
                f.write_str("<")?;
                write_set(f, x)?;
                f.write_str(",{}>")
            }
            GadgetPoint::UpperCopy(y) => {
                f.write_str("<1,")?;
                write_set(f, y)?;
                f.write_str(">")
            }
            GadgetPoint::Filler => f.write_str("<t>"),
        }
    }
}

/// Canonical text form: base names verbatim, gadget points as
/// `point@level[lower..upper]`.
impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Base(s) => f.write_str(s),
            Element::Gadget(g) => write!(f, "{}@{}[{}..{}]", g.point, g.level, g.lower, g.upper),
        }
    }
}
