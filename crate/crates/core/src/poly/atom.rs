use std::collections::HashMap;
use std::fmt;
use std::sync::{LazyLock, RwLock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomKind {
    /// One of the four covector components `xi0..xi3`.
    Covector,
    Parameter,
}

/// An interned symbol. Identity is `(name, index)`; the kind is fixed at
/// first registration. Ids `0..4` are reserved for `xi0..xi3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(pub(crate) u16);

#[derive(Debug, Clone)]
struct AtomInfo {
    name: String,
    index: Option<u32>,
    kind: AtomKind,
}

struct Registry {
    atoms: Vec<AtomInfo>,
    lookup: HashMap<(String, Option<u32>), u16>,
}

static REGISTRY: LazyLock<RwLock<Registry>> = LazyLock::new(|| {
    let mut reg = Registry {
        atoms: Vec::new(),
        lookup: HashMap::new(),
    };
    for k in 0..4 {
        reg.insert("xi", Some(k), AtomKind::Covector);
    }
    RwLock::new(reg)
});

impl Registry {
    fn insert(&mut self, name: &str, index: Option<u32>, kind: AtomKind) -> u16 {
        let id = u16::try_from(self.atoms.len()).expect("atom table overflow");
        self.atoms.push(AtomInfo {
            name: name.to_string(),
            index,
            kind,
        });
        self.lookup.insert((name.to_string(), index), id);
        id
    }
}

impl Atom {
    pub const XI: [Atom; 4] = [Atom(0), Atom(1), Atom(2), Atom(3)];

    pub fn xi(k: usize) -> Atom {
        Atom::XI[k]
    }

    /// Interns a scalar parameter.
    pub fn param(name: &str) -> Atom {
        Atom::intern(name, None)
    }

    pub fn param_indexed(name: &str, index: u32) -> Atom {
        Atom::intern(name, Some(index))
    }

    fn intern(name: &str, index: Option<u32>) -> Atom {
        if name == "xi" {
            if let Some(k) = index.filter(|k| *k < 4) {
                return Atom(k as u16);
            }
        }
        let key = (name.to_string(), index);
        if let Some(&id) = REGISTRY.read().unwrap().lookup.get(&key) {
            return Atom(id);
        }
        let mut reg = REGISTRY.write().unwrap();
        if let Some(&id) = reg.lookup.get(&key) {
            return Atom(id);
        }
        Atom(reg.insert(name, index, AtomKind::Parameter))
    }

    /// Looks up an atom by its rendered form (`xi2`, `F`, `u[1]`).
    pub fn from_text(text: &str) -> Atom {
        if let Some(k) = text.strip_prefix("xi").and_then(|k| k.parse::<u32>().ok()) {
            if k < 4 {
                return Atom(k as u16);
            }
        }
        if let Some((name, rest)) = text.split_once('[') {
            if let Some(idx) = rest.strip_suffix(']').and_then(|i| i.parse().ok()) {
                return Atom::param_indexed(name, idx);
            }
        }
        Atom::param(text)
    }

    pub fn is_covector(self) -> bool {
        self.0 < 4
    }

    pub fn kind(self) -> AtomKind {
        if self.is_covector() {
            AtomKind::Covector
        } else {
            AtomKind::Parameter
        }
    }

    pub fn name(self) -> String {
        REGISTRY.read().unwrap().atoms[self.0 as usize].name.clone()
    }

    pub fn index(self) -> Option<u32> {
        REGISTRY.read().unwrap().atoms[self.0 as usize].index
    }

    /// Order key independent of interning order; used for rendering.
    pub(crate) fn sort_key(self) -> (AtomKind, String, Option<u32>) {
        let reg = REGISTRY.read().unwrap();
        let info = &reg.atoms[self.0 as usize];
        (info.kind, info.name.clone(), info.index)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reg = REGISTRY.read().unwrap();
        let info = &reg.atoms[self.0 as usize];
        match (info.kind, info.index) {
            (AtomKind::Covector, Some(k)) => write!(f, "xi{k}"),
            (_, Some(k)) => write!(f, "{}[{k}]", info.name),
            (_, None) => write!(f, "{}", info.name),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covector_atoms_are_reserved() {
        assert_eq!(Atom::from_text("xi3"), Atom::xi(3));
        assert!(Atom::xi(0).is_covector());
        assert_eq!(Atom::param_indexed("xi", 1), Atom::xi(1));
        assert_eq!(Atom::xi(2).to_string(), "xi2");
    }

    #[test]
    fn identity_is_name_and_index() {
        let a = Atom::param("atom_test_u");
        let b = Atom::param_indexed("atom_test_u", 0);
        assert_ne!(a, b);
        assert_eq!(Atom::from_text("atom_test_u[0]"), b);
        assert_eq!(b.to_string(), "atom_test_u[0]");
        assert_eq!(b.kind(), AtomKind::Parameter);
        // xi with an out-of-range index is an ordinary parameter
        assert!(!Atom::from_text("xi7").is_covector());
    }
}
