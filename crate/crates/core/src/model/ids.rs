//! Typed identifiers and the ordered object stores that own scheme lists.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;

/// A stable small-integer handle into one of the scheme lists.
pub trait EntityId: Copy + Ord + Eq + Hash + fmt::Debug + fmt::Display {
    /// Short tag used in reports and the text format (`pt`, `pipe`, ...).
    const TAG: &'static str;

    fn from_index(index: u32) -> Self;
    fn index(self) -> u32;
}

macro_rules! entity_id {
    ($(#[$meta:meta])* $name:ident, $tag:literal) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
        pub struct $name(pub u32);

        impl EntityId for $name {
            const TAG: &'static str = $tag;

            fn from_index(index: u32) -> Self {
                $name(index)
            }

            fn index(self) -> u32 {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}{}", $tag, self.0)
            }
        }
    };
}

entity_id!(/// Spatial point.
    PointId, "pt");
entity_id!(/// Straight pipe between two points.
    PipeId, "pipe");
entity_id!(JointId, "joint");
entity_id!(OffsetId, "offset");
entity_id!(BreakId, "break");
entity_id!(/// Entry of the internal symbol library.
    SymbolId, "sym");
entity_id!(BlockId, "block");
entity_id!(TextId, "text");
entity_id!(PipeLeaderId, "pleader");
entity_id!(BlockLeaderId, "bleader");
entity_id!(MarkId, "mark");
entity_id!(SpecPropsId, "props");
entity_id!(DimensionId, "dim");
entity_id!(ElevationId, "elev");
entity_id!(SlopeId, "slope");

/// Ordered list of objects keyed by never-reused identifiers.
///
/// Iteration follows identifier order, which is also creation order.
/// Equality compares the stored objects only, not the id counter.
#[derive(Debug, Clone)]
pub struct Store<I: EntityId, T> {
    items: BTreeMap<I, T>,
    next: u32,
}

impl<I: EntityId, T> Default for Store<I, T> {
    fn default() -> Self {
        Store {
            items: BTreeMap::new(),
            next: 0,
        }
    }
}

impl<I: EntityId, T: PartialEq> PartialEq for Store<I, T> {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items
    }
}

impl<I: EntityId, T> Store<I, T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, item: T) -> I {
        let id = I::from_index(self.next);
        self.next += 1;
        self.items.insert(id, item);
        id
    }

    /// Inserts under an explicit id (used by loaders); the counter moves past it.
    pub fn insert_with_id(&mut self, id: I, item: T) -> Option<T> {
        self.next = self.next.max(id.index() + 1);
        self.items.insert(id, item)
    }

    pub fn get(&self, id: I) -> Option<&T> {
        self.items.get(&id)
    }

    pub fn get_mut(&mut self, id: I) -> Option<&mut T> {
        self.items.get_mut(&id)
    }

    pub fn contains(&self, id: I) -> bool {
        self.items.contains_key(&id)
    }

    pub fn remove(&mut self, id: I) -> Option<T> {
        self.items.remove(&id)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (I, &T)> + '_ {
        self.items.iter().map(|(id, item)| (*id, item))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (I, &mut T)> + '_ {
        self.items.iter_mut().map(|(id, item)| (*id, item))
    }

    pub fn ids(&self) -> impl DoubleEndedIterator<Item = I> + '_ {
        self.items.keys().copied()
    }

    pub fn values(&self) -> impl DoubleEndedIterator<Item = &T> + '_ {
        self.items.values()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(I, &T) -> bool) {
        self.items.retain(|id, item| keep(*id, item));
    }

    /// Dense position of `id` within the store, as used by persistence.
    pub fn dense_index(&self, id: I) -> Option<usize> {
        if self.items.contains_key(&id) {
            Some(self.items.range(..id).count())
        } else {
            None
        }
    }

    /// Map from current ids to dense `0..len` ids in order.
    pub fn dense_map(&self) -> BTreeMap<I, I> {
        self.items
            .keys()
            .enumerate()
            .map(|(i, id)| (*id, I::from_index(i as u32)))
            .collect()
    }
}

impl<I: EntityId, T> FromIterator<T> for Store<I, T> {
    fn from_iter<It: IntoIterator<Item = T>>(iter: It) -> Self {
        let mut store = Store::new();
        for item in iter {
            store.insert(item);
        }
        store
    }
}
