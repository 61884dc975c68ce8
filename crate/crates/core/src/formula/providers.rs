//! Invariant providers: the interface, a multilinear wrapper, the table
//! provider and synthetic closed-form providers.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::path::Path;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{CorrelatorQuery, FormulaError};
use crate::rational::{self, Rat};
use crate::target::{permutation_sign, GradedBasis, GradedClass, Side, TargetModel};

pub const TABLE_SCHEMA: &str = "degenform/invariants/v1";

/// Supplies vertex correlators. `Ok(None)` means the value is unknown.
pub trait InvariantProvider: Sync {
    fn lookup(&self, t: &TargetModel, q: &CorrelatorQuery) -> Result<Option<Rat>, FormulaError>;
}

/// A correlator with every insertion a single basis element, in canonical
/// order: absolute insertions sorted by `(psi, basis index)`, relative ones
/// by `(weight, basis index)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasicQuery {
    pub side: Side,
    pub genus: u32,
    pub class: Vec<i64>,
    pub absolute: Vec<(u32, usize)>,
    pub relative: Vec<(u32, usize)>,
}

/// Sorts both insertion lists and returns the Koszul sign of the reordering.
fn canonical_order(
    absolute: Vec<(u32, usize)>,
    relative: Vec<(u32, usize)>,
    x_basis: &GradedBasis,
    d_basis: &GradedBasis,
) -> (Vec<(u32, usize)>, Vec<(u32, usize)>, bool) {
    let sort = |list: Vec<(u32, usize)>, basis: &GradedBasis| {
        let odd: Vec<bool> = list.iter().map(|&(_, i)| basis.degree(i) % 2 == 1).collect();
        let mut perm: Vec<usize> = (0..list.len()).collect();
        perm.sort_by_key(|&k| list[k]);
        let negative = permutation_sign(&odd, &perm) == crate::target::Sign::Minus;
        (perm.iter().map(|&k| list[k]).collect::<Vec<_>>(), negative)
    };
    let (a, s1) = sort(absolute, x_basis);
    let (r, s2) = sort(relative, d_basis);
    (a, r, s1 != s2)
}

/// Change of basis for `H*(D)`: a class with coordinates `c` in the target's
/// basis has coordinates `c · matrix` in `basis`.
#[derive(Clone, Debug)]
pub struct DReference {
    pub matrix: Vec<Vec<Rat>>,
    pub basis: GradedBasis,
}

/// Expands a query by multilinearity into signed basic queries.
pub fn expand(
    t: &TargetModel,
    q: &CorrelatorQuery,
    reference: Option<&DReference>,
) -> Vec<(Rat, BasicQuery)> {
    let x_basis = &t.component(q.side).cohomology;
    let d_basis = reference.map_or(&t.d_cohomology, |r| &r.basis);
    let to_ref = |c: &GradedClass| -> Vec<Rat> {
        match reference {
            None => c.coeffs.clone(),
            Some(r) => (0..r.basis.len())
                .map(|k| c.coeffs.iter().zip(&r.matrix).map(|(x, row)| x * &row[k]).sum())
                .collect(),
        }
    };
    let mut slots: Vec<Vec<(Rat, usize)>> = Vec::new();
    for a in &q.absolute {
        slots.push(support(&a.class.coeffs));
    }
    for r in &q.relative {
        slots.push(support(&to_ref(&r.class)));
    }
    let na = q.absolute.len();
    let mut out = Vec::new();
    let mut choice = vec![0usize; slots.len()];
    if slots.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let mut coeff = Rat::one();
        let mut absolute = Vec::with_capacity(na);
        let mut relative = Vec::with_capacity(q.relative.len());
        for (k, &c) in choice.iter().enumerate() {
            let (x, idx) = &slots[k][c];
            coeff *= x;
            if k < na {
                absolute.push((q.absolute[k].psi, *idx));
            } else {
                relative.push((q.relative[k - na].weight, *idx));
            }
        }
        let (absolute, relative, negative) = canonical_order(absolute, relative, x_basis, d_basis);
        if negative {
            coeff = -coeff;
        }
        out.push((
            coeff,
            BasicQuery {
                side: q.side,
                genus: q.genus,
                class: q.class.clone(),
                absolute,
                relative,
            },
        ));
        let mut k = slots.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < slots[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

fn support(coeffs: &[Rat]) -> Vec<(Rat, usize)> {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (c.clone(), i))
        .collect()
}

/// Evaluates a query through `basic`, which answers basic queries only.
pub fn multilinear_lookup(
    t: &TargetModel,
    q: &CorrelatorQuery,
    reference: Option<&DReference>,
    mut basic: impl FnMut(&BasicQuery) -> Option<Rat>,
) -> Option<Rat> {
    let mut total = Rat::zero();
    for (c, b) in expand(t, q, reference) {
        total += c * basic(&b)?;
    }
    Some(total)
}

/// Provider backed by a table of basic correlators.
#[derive(Clone, Debug, Default)]
pub struct TableProvider {
    pub values: BTreeMap<BasicQuery, Rat>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    schema: String,
    records: Vec<RecordDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordDoc {
    component: Side,
    genus: u32,
    class: BTreeMap<String, i64>,
    #[serde(default)]
    insertions: Vec<(u32, String)>,
    #[serde(default)]
    relative: Vec<(u32, String)>,
    value: String,
}

impl TableProvider {
    pub fn load(path: &Path, t: &TargetModel) -> Result<Self, FormulaError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FormulaError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, t)
    }

    pub fn from_json(text: &str, t: &TargetModel) -> Result<Self, FormulaError> {
        let doc: TableDoc =
            serde_json::from_str(text).map_err(|e| FormulaError::Parse(e.to_string()))?;
        if doc.schema != TABLE_SCHEMA {
            return Err(FormulaError::Parse(format!(
                "unsupported schema {:?}, expected {TABLE_SCHEMA:?}",
                doc.schema
            )));
        }
        let mut values: BTreeMap<BasicQuery, Rat> = BTreeMap::new();
        for (i, r) in doc.records.into_iter().enumerate() {
            let ctx = |m: String| FormulaError::Parse(format!("record {i}: {m}"));
            let comp = t.component(r.component);
            let mut class = vec![0i64; comp.rank()];
            for (name, c) in &r.class {
                let k = comp
                    .generators
                    .iter()
                    .position(|g| g == name)
                    .ok_or_else(|| ctx(format!("unknown generator {name:?}")))?;
                class[k] = *c;
            }
            let x_basis = &comp.cohomology;
            let absolute = r
                .insertions
                .iter()
                .map(|(m, name)| {
                    x_basis
                        .index_of(name)
                        .map(|k| (*m, k))
                        .ok_or_else(|| ctx(format!("unknown class {name:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let relative = r
                .relative
                .iter()
                .map(|(w, name)| {
                    if *w == 0 {
                        return Err(ctx("contact order must be positive".into()));
                    }
                    t.d_cohomology
                        .index_of(name)
                        .map(|k| (*w, k))
                        .ok_or_else(|| ctx(format!("unknown D class {name:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let contact: i64 = relative.iter().map(|&(w, _)| w as i64).sum();
            if comp.d_degree_of(&class) != contact {
                return Err(ctx(format!(
                    "contact orders sum to {contact} but the class has D-degree {}",
                    comp.d_degree_of(&class)
                )));
            }
            let mut value = rational::parse(&r.value).map_err(ctx)?;
            let (absolute, relative, negative) =
                canonical_order(absolute, relative, x_basis, &t.d_cohomology);
            if negative {
                value = -value;
            }
            let key = BasicQuery {
                side: r.component,
                genus: r.genus,
                class,
                absolute,
                relative,
            };
            match values.get(&key) {
                Some(old) if *old != value => {
                    return Err(FormulaError::DuplicateRecord(format!(
                        "record {i} contradicts an earlier record ({} vs {})",
                        rational::format(&value),
                        rational::format(old)
                    )))
                }
                _ => {
                    values.insert(key, value);
                }
            }
        }
        Ok(TableProvider { values })
    }
}

impl InvariantProvider for TableProvider {
    fn lookup(&self, t: &TargetModel, q: &CorrelatorQuery) -> Result<Option<Rat>, FormulaError> {
        Ok(multilinear_lookup(t, q, None, |b| self.values.get(b).cloned()))
    }
}

/// Closed-form providers for tests and regression runs.
#[derive(Clone, Debug)]
pub enum Synthetic {
    /// Every correlator equals the constant.
    Constant(Rat),
    /// The product of the contact orders of the relative insertions.
    Multiplicative,
    /// A multilinear provider whose basic values are pseudo-random rationals
    /// determined by the seed and the basic query (in reference coordinates
    /// when a reference is given).
    RandomMultilinear {
        seed: u64,
        reference: Option<DReference>,
    },
}

fn pseudo_random_value(seed: u64, b: &BasicQuery) -> Rat {
    let mut h = DefaultHasher::new();
    seed.hash(&mut h);
    b.hash(&mut h);
    let x = h.finish();
    let num = (x % 7) as i64 - 3;
    let den = ((x >> 8) % 3) as i64 + 1;
    rational::ratio(num, den)
}

impl InvariantProvider for Synthetic {
    fn lookup(&self, t: &TargetModel, q: &CorrelatorQuery) -> Result<Option<Rat>, FormulaError> {
        Ok(Some(match self {
            Synthetic::Constant(c) => c.clone(),
            Synthetic::Multiplicative => q
                .relative
                .iter()
                .map(|r| rational::from_i64(r.weight as i64))
                .fold(Rat::one(), |a, b| a * b),
            Synthetic::RandomMultilinear { seed, reference } => {
                multilinear_lookup(t, q, reference.as_ref(), |b| Some(pseudo_random_value(*seed, b)))
                    .expect("always defined")
            }
        }))
    }
}
