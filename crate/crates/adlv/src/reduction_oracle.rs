//! The independent ground-truth engine: dimension tables for every class,
//! computed by Deligne-Lusztig reduction trees with class-level
//! memoization.
//!
//! The recursion follows two moves. A twist w -> s w sigma(s) that
//! preserves length is an exchange and leaves the table unchanged; a
//! twist that drops length by two splits into the two children s*w and
//! s*w*sigma(s), whose tables are merged by pointwise maximum and then
//! incremented. At a minimal element the table has the single entry given
//! by the element's class, with dimension len - <nu, 2 rho>. Emptiness is
//! represented by absence of the key.

use crate::affine_weyl::AffineElement;
use crate::error::{AdlvError, Result};
use crate::linalg::{rat, Rat};
use crate::root_system::RootDatum;
use crate::sigma_classes::{class_leq, invariants_of, ClassInvariant};
use rustc_hash::{FxHashMap, FxHashSet};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Deterministic choice of the split move inside a twist-equivalence
/// class; tables must not depend on it, which the tests verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitPolicy {
    LexFirst,
    LexLast,
}

/// Node budget: every visited element and memo insert counts. Exceeding
/// the budget is a hard failure, never a truncated answer.
pub struct Budget {
    limit: u64,
    used: AtomicU64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: AtomicU64::new(0) }
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    fn consume(&self, n: u64) -> Result<()> {
        let prev = self.used.fetch_add(n, Ordering::Relaxed);
        if prev + n > self.limit {
            Err(AdlvError::BudgetExhausted { used: prev + n, limit: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Map from class invariants to dimensions; absent classes are empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimTable {
    pub entries: BTreeMap<ClassInvariant, u32>,
}

impl DimTable {
    pub fn dim(&self, b: &ClassInvariant) -> Option<u32> {
        self.entries.get(b).copied()
    }

    pub fn to_json(&self, d: &RootDatum, w: &AffineElement) -> Value {
        json!({
            "w": crate::parse::serialize_element(d, w),
            "entries": self.entries.iter().map(|(b, &dim)| {
                let mut v = b.to_json(d);
                v["dim"] = json!(dim);
                v
            }).collect::<Vec<_>>(),
        })
    }
}

/// Outcome of the descent search at w.
#[derive(Debug, Clone)]
pub enum Descent {
    /// The whole twist-class admits no length-decreasing move.
    Minimal,
    /// A length-preserving path to an element that admits a split.
    Exchange { to: AffineElement, path: Vec<u8> },
    /// w itself splits at the given simple reflection.
    Split { s: u8 },
}

pub struct Oracle<'d> {
    pub datum: &'d RootDatum,
    pub policy: SplitPolicy,
    pub budget: Budget,
    memo: RwLock<FxHashMap<AffineElement, Arc<DimTable>>>,
    /// Member -> twist-class data; one closure computation serves every
    /// member of the class.
    classes: RwLock<FxHashMap<AffineElement, Arc<ClassData>>>,
}

/// Shared data of one twist-equivalence class.
struct ClassData {
    canon: AffineElement,
    /// First and last length-dropping (element, generator) pair in the
    /// sorted order, if any; the split policy picks between them.
    split_first: Option<(AffineElement, u8)>,
    split_last: Option<(AffineElement, u8)>,
}

struct Closure {
    /// Sorted members of the twist-equivalence class of w.
    elems: Vec<AffineElement>,
    /// Parent pointers from the BFS: for each element, the
    /// (parent element, generator) used to reach it. The start element
    /// has no parent.
    parents: FxHashMap<AffineElement, (AffineElement, u8)>,
}

impl<'d> Oracle<'d> {
    pub fn new(datum: &'d RootDatum) -> Self {
        Oracle::with_budget(datum, DEFAULT_BUDGET, SplitPolicy::LexFirst)
    }

    pub fn with_budget(datum: &'d RootDatum, limit: u64, policy: SplitPolicy) -> Self {
        Oracle {
            datum,
            policy,
            budget: Budget::new(limit),
            memo: RwLock::new(FxHashMap::default()),
            classes: RwLock::new(FxHashMap::default()),
        }
    }

    fn class_data(&self, w: &AffineElement) -> Result<Arc<ClassData>> {
        if let Some(c) = self.classes.read().unwrap().get(w) {
            return Ok(Arc::clone(c));
        }
        let len = self.datum.length(w)?;
        let closure = self.closure(w)?;
        let cands = self.split_candidates(&closure, len)?;
        let data = Arc::new(ClassData {
            canon: closure.elems[0],
            split_first: cands.first().copied(),
            split_last: cands.last().copied(),
        });
        let mut map = self.classes.write().unwrap();
        for e in &closure.elems {
            map.entry(*e).or_insert_with(|| Arc::clone(&data));
        }
        Ok(data)
    }

    /// Twist w by the k-th affine simple reflection: s w sigma(s).
    fn twist(&self, w: &AffineElement, k: usize) -> Result<AffineElement> {
        let d = self.datum;
        let s = &d.simple_reflections()[k];
        let ss = d.apply_sigma(s);
        d.multiply(&d.multiply(s, w)?, &ss)
    }

    /// BFS closure of w under length-preserving twists.
    fn closure(&self, w: &AffineElement) -> Result<Closure> {
        let d = self.datum;
        let len = d.length(w)?;
        let mut seen: FxHashSet<AffineElement> = FxHashSet::default();
        let mut queue = std::collections::VecDeque::new();
        let mut parents = FxHashMap::default();
        seen.insert(*w);
        queue.push_back(*w);
        while let Some(x) = queue.pop_front() {
            self.budget.consume(1)?;
            for k in 0..d.simple_reflections().len() {
                let y = self.twist(&x, k)?;
                if d.aff_len_unchecked(&y) == len && seen.insert(y) {
                    parents.insert(y, (x, k as u8));
                    queue.push_back(y);
                }
            }
        }
        let mut elems: Vec<AffineElement> = seen.into_iter().collect();
        elems.sort();
        Ok(Closure { elems, parents })
    }

    /// All (element, generator) pairs in the closure that drop the length
    /// by two, in sorted order.
    fn split_candidates(&self, closure: &Closure, len: u32) -> Result<Vec<(AffineElement, u8)>> {
        let d = self.datum;
        let mut out = Vec::new();
        for x in &closure.elems {
            for k in 0..d.simple_reflections().len() {
                let y = self.twist(x, k)?;
                let ly = d.aff_len_unchecked(&y);
                debug_assert!(ly == len || ly == len + 2 || ly + 2 == len);
                if ly + 2 == len {
                    out.push((*x, k as u8));
                }
            }
        }
        Ok(out)
    }

    /// Explore the twist-class of w and report how to descend.
    pub fn find_descent(&self, w: &AffineElement) -> Result<Descent> {
        let d = self.datum;
        let len = d.length(w)?;
        if len == 0 {
            return Ok(Descent::Minimal);
        }
        let closure = self.closure(w)?;
        let cands = self.split_candidates(&closure, len)?;
        let Some(&(at, s)) = cands.first() else {
            return Ok(Descent::Minimal);
        };
        if at == *w {
            return Ok(Descent::Split { s });
        }
        // Reconstruct the twist path w -> at from the BFS parents.
        let mut path = Vec::new();
        let mut cur = at;
        while cur != *w {
            let (p, k) = closure.parents[&cur];
            path.push(k);
            cur = p;
        }
        path.reverse();
        Ok(Descent::Exchange { to: at, path })
    }

    pub fn is_minimal(&self, w: &AffineElement) -> Result<bool> {
        Ok(self.class_data(w)?.split_first.is_none())
    }

    /// The full dimension table of w, memoized per twist-class.
    pub fn dim_table(&self, w: &AffineElement) -> Result<Arc<DimTable>> {
        let d = self.datum;
        let len = d.length(w)?;
        let data = self.class_data(w)?;
        let canon = data.canon;
        if let Some(t) = self.memo.read().unwrap().get(&canon) {
            return Ok(Arc::clone(t));
        }
        let table = match match self.policy {
            SplitPolicy::LexFirst => data.split_first.as_ref(),
            SplitPolicy::LexLast => data.split_last.as_ref(),
        } {
            None => {
                // Minimal element: single-entry table from the class.
                let b = invariants_of(d, &canon)?;
                let two_rho_nu = d.pair_rho(&b.nu) * rat(2, 1);
                let dim = Rat::from_integer(len as i64) - two_rho_nu;
                if !dim.is_integer() || dim < Rat::from_integer(0) {
                    return Err(AdlvError::InvariantViolation(format!(
                        "minimal element has len - <nu,2rho> = {:?}, not a natural number",
                        dim
                    )));
                }
                let mut entries = BTreeMap::new();
                entries.insert(b, dim.to_integer() as u32);
                DimTable { entries }
            }
            Some(&(at, s)) => {
                let sref = d.simple_reflections()[s as usize];
                let child1 = d.multiply(&sref, &at)?;
                let child2 = self.twist(&at, s as usize)?;
                debug_assert_eq!(d.aff_len_unchecked(&child1) + 1, len);
                debug_assert_eq!(d.aff_len_unchecked(&child2) + 2, len);
                let t1 = self.dim_table(&child1)?;
                let t2 = self.dim_table(&child2)?;
                let mut entries = t1.entries.clone();
                for (b, &dim) in &t2.entries {
                    entries
                        .entry(b.clone())
                        .and_modify(|cur| *cur = (*cur).max(dim))
                        .or_insert(dim);
                }
                for dim in entries.values_mut() {
                    *dim += 1;
                }
                DimTable { entries }
            }
        };
        // Every key must carry kappa(w); the moves preserve it.
        let kw = d.kappa(&canon);
        for b in table.entries.keys() {
            if b.kappa != kw {
                return Err(AdlvError::InvariantViolation(
                    "dimension table contains a key with foreign kappa".into(),
                ));
            }
        }
        debug_assert!(table.entries.values().all(|&dim| dim <= len));
        self.budget.consume(1)?;
        let arc = Arc::new(table);
        self.memo
            .write()
            .unwrap()
            .entry(canon)
            .or_insert_with(|| Arc::clone(&arc));
        Ok(arc)
    }

    /// The unique maximal class of the table; non-uniqueness is an
    /// invariant violation and surfaces loudly.
    pub fn b_max(&self, w: &AffineElement) -> Result<ClassInvariant> {
        let table = self.dim_table(w)?;
        self.b_max_of_table(&table)
    }

    pub fn b_max_of_table(&self, table: &DimTable) -> Result<ClassInvariant> {
        let d = self.datum;
        let keys: Vec<&ClassInvariant> = table.entries.keys().collect();
        if keys.is_empty() {
            return Err(AdlvError::InvariantViolation("empty dimension table".into()));
        }
        let maxima: Vec<&ClassInvariant> = keys
            .iter()
            .copied()
            .filter(|b| keys.iter().all(|c| **c == **b || !class_leq(d, b, c)))
            .collect();
        if maxima.len() != 1 {
            return Err(AdlvError::InvariantViolation(format!(
                "dimension table has {} maximal classes, expected exactly one",
                maxima.len()
            )));
        }
        let bmax = maxima[0].clone();
        // the maximum must dominate every key
        for c in &keys {
            if !class_leq(d, c, &bmax) {
                return Err(AdlvError::InvariantViolation(
                    "maximal class does not dominate the whole table".into(),
                ));
            }
        }
        Ok(bmax)
    }

    /// Cordiality via the oracle: the dimension at the maximal class
    /// attains the virtual dimension.
    pub fn is_cordial(&self, w: &AffineElement) -> Result<bool> {
        let table = self.dim_table(w)?;
        let bmax = self.b_max_of_table(&table)?;
        let dim = table.dim(&bmax).expect("bmax is a key");
        let d_virt = crate::formulas::virtual_dim(self.datum, w, &bmax)?;
        Ok(Rat::from_integer(dim as i64) == d_virt)
    }
}
