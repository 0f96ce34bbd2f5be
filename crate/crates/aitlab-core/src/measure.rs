//! Elementary measures: finitely-supported rational mass functions on bit
//! strings. Atoms are strictly positive and the total mass never exceeds 1;
//! a measure with total exactly 1 is a probability measure, anything smaller
//! is a semimeasure.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::bits::Bits;
use crate::exact::Rat;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ElementaryMeasure {
    atoms: BTreeMap<Bits, Rat>,
    total: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureError {
    NonPositiveAtom(Bits),
    DuplicateAtom(Bits),
    MassExceedsOne,
}

impl fmt::Display for MeasureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureError::NonPositiveAtom(x) => write!(f, "atom {x:?} has non-positive mass"),
            MeasureError::DuplicateAtom(x) => write!(f, "atom {x:?} listed twice"),
            MeasureError::MassExceedsOne => write!(f, "total mass exceeds 1"),
        }
    }
}

impl ElementaryMeasure {
    pub fn new(pairs: impl IntoIterator<Item = (Bits, Rat)>) -> Result<Self, MeasureError> {
        let mut atoms = BTreeMap::new();
        let mut total = Rat::zero();
        for (x, q) in pairs {
            if !q.is_positive() {
                return Err(MeasureError::NonPositiveAtom(x));
            }
            total += &q;
            if atoms.insert(x.clone(), q).is_some() {
                return Err(MeasureError::DuplicateAtom(x));
            }
        }
        if total > Rat::one() {
            return Err(MeasureError::MassExceedsOne);
        }
        Ok(ElementaryMeasure { atoms, total })
    }

    pub fn point_mass(x: Bits) -> Self {
        ElementaryMeasure::new([(x, Rat::one())]).expect("point mass is a measure")
    }

    /// Equal mass 1/m on each of m distinct strings.
    pub fn uniform(items: impl IntoIterator<Item = Bits>) -> Result<Self, MeasureError> {
        let items: Vec<Bits> = items.into_iter().collect();
        let m = items.len();
        assert!(m > 0, "uniform measure needs a non-empty support");
        let w = Rat::new(1.into(), (m as i64).into());
        ElementaryMeasure::new(items.into_iter().map(|x| (x, w.clone())))
    }

    pub fn mass(&self, x: &Bits) -> Rat {
        self.atoms.get(x).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn contains(&self, x: &Bits) -> bool {
        self.atoms.contains_key(x)
    }

    pub fn total(&self) -> &Rat {
        &self.total
    }

    pub fn is_probability(&self) -> bool {
        self.total.is_one()
    }

    /// Support in canonical string order.
    pub fn support(&self) -> impl Iterator<Item = (&Bits, &Rat)> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::exact::rat;

    #[test]
    fn rejects_bad_measures() {
        assert!(matches!(
            ElementaryMeasure::new([(bits("0"), rat(0, 1))]),
            Err(MeasureError::NonPositiveAtom(_))
        ));
        assert!(matches!(
            ElementaryMeasure::new([(bits("0"), rat(1, 2)), (bits("0"), rat(1, 2))]),
            Err(MeasureError::DuplicateAtom(_))
        ));
        assert!(matches!(
            ElementaryMeasure::new([(bits("0"), rat(2, 3)), (bits("1"), rat(2, 3))]),
            Err(MeasureError::MassExceedsOne)
        ));
    }

    #[test]
    fn uniform_and_point() {
        let u = ElementaryMeasure::uniform([bits("00"), bits("01"), bits("10")]).unwrap();
        assert_eq!(u.mass(&bits("01")), rat(1, 3));
        assert_eq!(u.mass(&bits("11")), rat(0, 1));
        assert!(u.is_probability());
        let p = ElementaryMeasure::point_mass(bits("1"));
        assert!(p.is_probability());
        assert_eq!(p.mass(&bits("1")), rat(1, 1));
    }
}
