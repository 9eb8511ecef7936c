use std::fmt;

use crate::error::{Error, Result};

/// A named tensor factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subsystem {
    pub name: String,
    pub dim: usize,
}

/// Ordered list of named subsystems. The total Hilbert space is the tensor
/// product in list order, first subsystem most significant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Register {
    subsystems: Vec<Subsystem>,
}

impl Register {
    pub fn new<I, S>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut subsystems: Vec<Subsystem> = Vec::new();
        for (name, dim) in items {
            let name = name.into();
            if dim == 0 {
                return Err(Error::ZeroDimension(name));
            }
            if subsystems.iter().any(|s| s.name == name) {
                return Err(Error::DuplicateSubsystem(name));
            }
            subsystems.push(Subsystem { name, dim });
        }
        Ok(Register { subsystems })
    }

    pub fn single(name: impl Into<String>, dim: usize) -> Result<Self> {
        Register::new([(name, dim)])
    }

    pub fn empty() -> Self {
        Register::default()
    }

    pub fn from_subsystems(subsystems: Vec<Subsystem>) -> Result<Self> {
        Register::new(subsystems.into_iter().map(|s| (s.name, s.dim)))
    }

    /// Total dimension (1 for the empty register).
    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.subsystems.iter().map(|s| s.name.as_str())
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.subsystems.iter().position(|s| s.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    pub fn dim_of(&self, name: &str) -> Result<usize> {
        self.position(name).map(|i| self.subsystems[i].dim).ok_or_else(|| Error::UnknownSubsystem(name.to_string()))
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Register) -> Result<Register> {
        Register::from_subsystems(self.subsystems.iter().chain(other.subsystems.iter()).cloned().collect())
    }

    /// Copy with subsystem `from` renamed to `to`.
    pub fn renamed(&self, from: &str, to: &str) -> Result<Register> {
        if !self.contains(from) {
            return Err(Error::UnknownSubsystem(from.to_string()));
        }
        Register::from_subsystems(
            self.subsystems
                .iter()
                .map(|s| Subsystem { name: if s.name == from { to.to_string() } else { s.name.clone() }, dim: s.dim })
                .collect(),
        )
    }

    /// Subsystems named in `names`, in the order given.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<Register> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let i = self.position(n.as_ref()).ok_or_else(|| Error::UnknownSubsystem(n.as_ref().to_string()))?;
            out.push(self.subsystems[i].clone());
        }
        Register::from_subsystems(out)
    }

    /// Subsystems named in `keep`, in register order.
    pub fn retain<S: AsRef<str>>(&self, keep: &[S]) -> Result<Register> {
        for n in keep {
            if !self.contains(n.as_ref()) {
                return Err(Error::UnknownSubsystem(n.as_ref().to_string()));
            }
        }
        Register::from_subsystems(
            self.subsystems.iter().filter(|s| keep.iter().any(|k| k.as_ref() == s.name)).cloned().collect(),
        )
    }

    /// True when both registers hold the same named subsystems, in any order.
    pub fn same_subsystems(&self, other: &Register) -> bool {
        self.len() == other.len() && self.subsystems.iter().all(|s| other.subsystems.iter().any(|o| o == s))
    }

    /// Mixed-radix digits of a flat basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for (k, s) in self.subsystems.iter().enumerate().rev() {
            out[k] = index % s.dim;
            index /= s.dim;
        }
        out
    }

    pub fn flat_index(&self, digits: &[usize]) -> usize {
        self.subsystems.iter().zip(digits).fold(0, |acc, (s, &d)| acc * s.dim + d)
    }
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.subsystems.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", s.name, s.dim)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_zero_dims() {
        assert_eq!(Register::new([("A", 2), ("A", 3)]), Err(Error::DuplicateSubsystem("A".into())));
        assert_eq!(Register::new([("A", 0)]), Err(Error::ZeroDimension("A".into())));
    }

    #[test]
    fn digits_round_trip() {
        let r = Register::new([("A", 2), ("B", 3), ("C", 2)]).unwrap();
        assert_eq!(r.dim(), 12);
        for i in 0..12 {
            assert_eq!(r.flat_index(&r.digits(i)), i);
        }
        assert_eq!(r.digits(7), vec![1, 0, 1]);
        assert_eq!(Register::empty().dim(), 1);
    }

    #[test]
    fn retain_keeps_register_order() {
        let r = Register::new([("A", 2), ("B", 3), ("C", 4)]).unwrap();
        let k = r.retain(&["C", "A"]).unwrap();
        assert_eq!(k.names().collect::<Vec<_>>(), vec!["A", "C"]);
        let s = r.select(&["C", "A"]).unwrap();
        assert_eq!(s.names().collect::<Vec<_>>(), vec!["C", "A"]);
        assert!(matches!(r.retain(&["Z"]), Err(Error::UnknownSubsystem(_))));
    }
}
