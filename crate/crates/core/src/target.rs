//! The degeneration target `X = X₁ ∪_D X₂` as combinatorial data: effective
//! class lattices with pushforwards and `D`-degrees, plus graded cohomology
//! with a pairing on `H*(D)`, dual bases, the diagonal and Koszul signs.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactcones::linalg;
use crate::rational::{self, Rat};

pub const TARGET_SCHEMA: &str = "degenform/target/v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TargetError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid target: {0}")]
    Invalid(String),
    #[error("pairing matrix is singular")]
    SingularPairing,
    #[error("pairing is not graded: entry ({0}, {1}) pairs degrees {2} and {3} against top degree {4}")]
    NotGraded(usize, usize, u32, u32, u32),
    #[error("class is not homogeneous")]
    NonHomogeneous,
    #[error("class has {found} coefficients, basis has {expected}")]
    BasisMismatch { expected: usize, found: usize },
    #[error("words are not related by a permutation")]
    NotPermutation,
    #[error("enumeration not finite: {0}")]
    EnumerationNotFinite(String),
    #[error("unknown {kind} name {name:?}")]
    UnknownName { kind: &'static str, name: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub name: String,
    pub degree: u32,
}

/// Ordered homogeneous basis of a graded vector space, optionally with the
/// pairing matrix `(∫ b_i b_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBasis {
    pub elements: Vec<BasisElement>,
    pub pairing: Option<Vec<Vec<Rat>>>,
}

impl GradedBasis {
    pub fn new(elements: Vec<BasisElement>) -> Self {
        GradedBasis {
            elements,
            pairing: None,
        }
    }

    pub fn with_pairing(
        elements: Vec<BasisElement>,
        pairing: Vec<Vec<Rat>>,
    ) -> Result<Self, TargetError> {
        let b = GradedBasis {
            elements,
            pairing: Some(pairing),
        };
        b.validate_pairing()?;
        Ok(b)
    }

    /// Point-like cohomology: one class `1` of degree 0 pairing to 1.
    pub fn point() -> Self {
        GradedBasis::with_pairing(
            vec![BasisElement {
                name: "1".into(),
                degree: 0,
            }],
            vec![vec![Rat::one()]],
        )
        .expect("valid")
    }

    /// `1` in degree 0 and `p` in degree 2 with `∫ 1·p = ∫ p·1 = 1`.
    pub fn projective_line() -> Self {
        GradedBasis::with_pairing(
            vec![
                BasisElement {
                    name: "1".into(),
                    degree: 0,
                },
                BasisElement {
                    name: "p".into(),
                    degree: 2,
                },
            ],
            vec![vec![Rat::zero(), Rat::one()], vec![Rat::one(), Rat::zero()]],
        )
        .expect("valid")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.elements[i].degree
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.name == name)
    }

    pub fn basis_class(&self, i: usize) -> GradedClass {
        let mut coeffs = vec![Rat::zero(); self.len()];
        coeffs[i] = Rat::one();
        GradedClass { coeffs }
    }

    /// Largest degree sum over nonzero pairing entries.
    pub fn top_degree(&self) -> Option<u32> {
        let p = self.pairing.as_ref()?;
        let mut top = None;
        for (i, row) in p.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    let s = self.degree(i) + self.degree(j);
                    top = Some(top.map_or(s, |t: u32| t.max(s)));
                }
            }
        }
        top
    }

    fn validate_pairing(&self) -> Result<(), TargetError> {
        let Some(p) = &self.pairing else {
            return Ok(());
        };
        let n = self.len();
        if p.len() != n || p.iter().any(|r| r.len() != n) {
            return Err(TargetError::Invalid(format!(
                "pairing must be {n}x{n}"
            )));
        }
        let top = self.top_degree().ok_or(TargetError::SingularPairing)?;
        for (i, row) in p.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() && self.degree(i) + self.degree(j) != top {
                    return Err(TargetError::NotGraded(
                        i,
                        j,
                        self.degree(i),
                        self.degree(j),
                        top,
                    ));
                }
            }
        }
        if linalg::inverse(p).is_none() {
            return Err(TargetError::SingularPairing);
        }
        Ok(())
    }
}

/// Rational coefficient vector over a [`GradedBasis`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedClass {
    pub coeffs: Vec<Rat>,
}

impl GradedClass {
    pub fn zero(len: usize) -> Self {
        GradedClass {
            coeffs: vec![Rat::zero(); len],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `Ok(None)` for the zero class, `Ok(Some(d))` when the support lies in
    /// degree `d`.
    pub fn homogeneous_degree(&self, basis: &GradedBasis) -> Result<Option<u32>, TargetError> {
        self.check_basis(basis)?;
        let mut deg = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match deg {
                None => deg = Some(basis.degree(i)),
                Some(d) if d != basis.degree(i) => return Err(TargetError::NonHomogeneous),
                _ => {}
            }
        }
        Ok(deg)
    }

    pub fn check_basis(&self, basis: &GradedBasis) -> Result<(), TargetError> {
        if self.coeffs.len() != basis.len() {
            return Err(TargetError::BasisMismatch {
                expected: basis.len(),
                found: self.coeffs.len(),
            });
        }
        Ok(())
    }

    pub fn scale(&self, s: &Rat) -> GradedClass {
        GradedClass {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &GradedClass) -> GradedClass {
        GradedClass {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

/// One summand `δ¹_j ⊗ δ²_j` of the diagonal of one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalSummand {
    pub index: usize,
    pub first: GradedClass,
    pub second: GradedClass,
    pub first_degree: u32,
    pub second_degree: u32,
}

/// Classes `δ²_j` with `∫ δ²_i δ¹_j = [i = j]`, where `δ¹` is the basis itself.
pub fn dual_basis(b: &GradedBasis) -> Result<Vec<GradedClass>, TargetError> {
    let p = b
        .pairing
        .as_ref()
        .ok_or_else(|| TargetError::Invalid("basis has no pairing".into()))?;
    let inv = linalg::inverse(p).ok_or(TargetError::SingularPairing)?;
    Ok(inv.into_iter().map(|coeffs| GradedClass { coeffs }).collect())
}

/// The diagonal `∏_e Σ_j δ¹_{e,j} ⊗ δ²_{e,j}`, listed per edge.
pub fn diagonal_class(
    b: &GradedBasis,
    edges: &[usize],
) -> Result<Vec<(usize, Vec<DiagonalSummand>)>, TargetError> {
    let dual = dual_basis(b)?;
    let top = b.top_degree().unwrap_or(0);
    let summands: Vec<DiagonalSummand> = dual
        .into_iter()
        .enumerate()
        .map(|(j, second)| DiagonalSummand {
            index: j,
            first: b.basis_class(j),
            second,
            first_degree: b.degree(j),
            second_degree: top - b.degree(j),
        })
        .collect();
    Ok(edges.iter().map(|&e| (e, summands.clone())).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn to_rat(self) -> Rat {
        match self {
            Sign::Plus => Rat::one(),
            Sign::Minus => -Rat::one(),
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity((self == Sign::Minus) != (rhs == Sign::Minus))
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// A homogeneous symbol of a graded word; `id` identifies it across words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub id: usize,
    pub degree: u32,
}

/// Sign of the permutation carrying `global` to `regrouped`, counting only
/// inversions between odd-degree symbols.
pub fn koszul_sign(global: &[Symbol], regrouped: &[Symbol]) -> Result<Sign, TargetError> {
    if global.len() != regrouped.len() {
        return Err(TargetError::NotPermutation);
    }
    let position: HashMap<usize, usize> = global.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
    if position.len() != global.len() {
        return Err(TargetError::NotPermutation);
    }
    let mut seen = vec![false; global.len()];
    let mut perm = Vec::with_capacity(global.len());
    for s in regrouped {
        let &i = position.get(&s.id).ok_or(TargetError::NotPermutation)?;
        if seen[i] || global[i].degree != s.degree {
            return Err(TargetError::NotPermutation);
        }
        seen[i] = true;
        perm.push(i);
    }
    let parities: Vec<bool> = global.iter().map(|s| s.degree % 2 == 1).collect();
    Ok(permutation_sign(&parities, &perm))
}

/// `perm[k]` is the original position of the symbol placed at `k`.
pub fn permutation_sign(odd: &[bool], perm: &[usize]) -> Sign {
    let mut inversions = 0usize;
    for a in 0..perm.len() {
        if !odd[perm[a]] {
            continue;
        }
        for b in a + 1..perm.len() {
            if odd[perm[b]] && perm[a] > perm[b] {
                inversions += 1;
            }
        }
    }
    Sign::from_parity(inversions % 2 == 1)
}

/// Data of one component `X_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentModel {
    pub generators: Vec<String>,
    /// One column per generator, each of length `class_rank`.
    pub pushforward: Vec<Vec<i64>>,
    pub d_degree: Vec<i64>,
    pub size: Vec<i64>,
    pub cohomology: GradedBasis,
    /// Rows indexed by the basis of `H*(X_i)`, columns by that of `H*(X)`.
    pub restriction: Vec<Vec<Rat>>,
}

impl ComponentModel {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn pushforward(&self, class: &[i64]) -> Vec<i64> {
        let m = self.pushforward.first().map_or(0, Vec::len);
        let mut out = vec![0i64; m];
        for (col, &c) in self.pushforward.iter().zip(class) {
            for (o, x) in out.iter_mut().zip(col) {
                *o += c * x;
            }
        }
        out
    }

    pub fn d_degree_of(&self, class: &[i64]) -> i64 {
        self.d_degree.iter().zip(class).map(|(a, b)| a * b).sum()
    }

    pub fn size_of(&self, class: &[i64]) -> i64 {
        self.size.iter().zip(class).map(|(a, b)| a * b).sum()
    }
}

/// Which side of the degeneration a vertex or class lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Side {
    One,
    Two,
}

impl TryFrom<u8> for Side {
    type Error = String;
    fn try_from(n: u8) -> Result<Self, String> {
        Side::from_number(n).ok_or_else(|| format!("side must be 1 or 2, got {n}"))
    }
}

impl From<Side> for u8 {
    fn from(s: Side) -> u8 {
        s.number()
    }
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::One => 0,
            Side::Two => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Side> {
        match n {
            1 => Some(Side::One),
            2 => Some(Side::Two),
            _ => None,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }

    pub const BOTH: [Side; 2] = [Side::One, Side::Two];
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetModel {
    pub class_rank: usize,
    pub components: [ComponentModel; 2],
    pub d_cohomology: GradedBasis,
    pub x_cohomology: GradedBasis,
}

impl TargetModel {
    pub fn component(&self, side: Side) -> &ComponentModel {
        &self.components[side.index()]
    }

    pub fn validate(&self) -> Result<(), TargetError> {
        for side in Side::BOTH {
            let c = self.component(side);
            let k = c.rank();
            let ctx = |msg: String| TargetError::Invalid(format!("component {side}: {msg}"));
            if c.pushforward.len() != k || c.d_degree.len() != k || c.size.len() != k {
                return Err(ctx(format!(
                    "pushforward, d_degree and size need one entry per generator ({k})"
                )));
            }
            if c.pushforward.iter().any(|col| col.len() != self.class_rank) {
                return Err(ctx(format!(
                    "pushforward columns must have length {}",
                    self.class_rank
                )));
            }
            if c.d_degree.iter().any(|&d| d < 0) {
                return Err(ctx("d_degree must be non-negative".into()));
            }
            if c.size.iter().any(|&s| s < 1) {
                return Err(TargetError::EnumerationNotFinite(format!(
                    "component {side}: size functional must be >= 1 on every generator"
                )));
            }
            let nx = self.x_cohomology.len();
            let ni = c.cohomology.len();
            if c.restriction.len() != ni || c.restriction.iter().any(|r| r.len() != nx) {
                return Err(ctx(format!("restriction must be {ni}x{nx}")));
            }
            for (i, row) in c.restriction.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    if !x.is_zero() && c.cohomology.degree(i) != self.x_cohomology.degree(j) {
                        return Err(ctx(format!(
                            "restriction entry ({i}, {j}) does not preserve degree"
                        )));
                    }
                }
            }
        }
        if self.d_cohomology.pairing.is_none() {
            return Err(TargetError::Invalid("H*(D) needs a pairing".into()));
        }
        self.d_cohomology.validate_pairing()?;
        Ok(())
    }

    /// A covector `h` on the ambient class lattice with `h ∘ pushforward[i] =
    /// size[i]`. The total size of every graph of class `β` is then `h·β`.
    pub fn ambient_size(&self) -> Result<Vec<Rat>, TargetError> {
        let m = self.class_rank;
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for side in Side::BOTH {
            let c = self.component(side);
            for (col, &s) in c.pushforward.iter().zip(&c.size) {
                let mut row: Vec<Rat> = col.iter().map(|&x| rational::from_i64(x)).collect();
                row.push(rational::from_i64(s));
                rows.push(row);
            }
        }
        let pivots = linalg::rref(&mut rows);
        if pivots.contains(&m) {
            return Err(TargetError::EnumerationNotFinite(
                "size functionals do not factor through the ambient class lattice".into(),
            ));
        }
        let mut h = vec![Rat::zero(); m];
        for (r, &p) in pivots.iter().enumerate() {
            h[p] = rows[r][m].clone();
        }
        Ok(h)
    }

    /// Upper bound on the summed size of all vertex classes of a graph of
    /// class `beta`.
    pub fn size_bound(&self, beta: &[i64]) -> Result<i64, TargetError> {
        let h = self.ambient_size()?;
        let total: Rat = h
            .iter()
            .zip(beta)
            .map(|(a, &b)| a * rational::from_i64(b))
            .sum();
        let floor = total.floor().to_integer();
        Ok(i64::try_from(floor).unwrap_or(i64::MAX))
    }

    /// `ι_i^*` applied to a class of `H*(X)`.
    pub fn restrict(&self, side: Side, c: &GradedClass) -> Result<GradedClass, TargetError> {
        c.check_basis(&self.x_cohomology)?;
        let r = &self.component(side).restriction;
        Ok(GradedClass {
            coeffs: r.iter().map(|row| linalg::rat_dot(row, &c.coeffs)).collect(),
        })
    }

    /// Parses a class written as `name`, `coef*name` or a `+`-separated sum of
    /// those against a basis.
    pub fn parse_class(basis: &GradedBasis, text: &str) -> Result<GradedClass, TargetError> {
        let mut class = GradedClass::zero(basis.len());
        for term in text.split('+').map(str::trim).filter(|t| !t.is_empty()) {
            let (coef, name) = match term.split_once('*') {
                Some((c, n)) => (rational::parse(c.trim()).map_err(TargetError::Parse)?, n.trim()),
                None => (Rat::one(), term),
            };
            let i = basis.index_of(name).ok_or_else(|| TargetError::UnknownName {
                kind: "cohomology class",
                name: name.to_string(),
            })?;
            class.coeffs[i] += coef;
        }
        Ok(class)
    }

    pub fn load(path: &Path) -> Result<Self, TargetError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TargetError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, TargetError> {
        let doc: TargetDoc =
            serde_json::from_str(text).map_err(|e| TargetError::Parse(e.to_string()))?;
        doc.into_model()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TargetDoc::from_model(self)).expect("serializable")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisDoc {
    basis: Vec<BasisElement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairing: Option<Vec<Vec<String>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    generators: Vec<String>,
    pushforward: Vec<Vec<i64>>,
    d_degree: Vec<i64>,
    size: Vec<i64>,
    cohomology: BasisDoc,
    restriction: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetDoc {
    schema: String,
    class_rank: usize,
    components: Vec<ComponentDoc>,
    d_cohomology: BasisDoc,
    x_cohomology: BasisDoc,
}

fn parse_matrix(rows: &[Vec<String>]) -> Result<Vec<Vec<Rat>>, TargetError> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|s| rational::parse(s).map_err(TargetError::Parse))
                .collect()
        })
        .collect()
}

fn format_matrix(rows: &[Vec<Rat>]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| r.iter().map(rational::format).collect())
        .collect()
}

impl BasisDoc {
    fn into_basis(self) -> Result<GradedBasis, TargetError> {
        let pairing = self.pairing.as_deref().map(parse_matrix).transpose()?;
        let b = GradedBasis {
            elements: self.basis,
            pairing,
        };
        let mut names: Vec<&str> = b.elements.iter().map(|e| e.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(TargetError::Invalid("duplicate basis names".into()));
        }
        Ok(b)
    }

    fn from_basis(b: &GradedBasis) -> Self {
        BasisDoc {
            basis: b.elements.clone(),
            pairing: b.pairing.as_deref().map(format_matrix),
        }
    }
}

impl TargetDoc {
    fn into_model(self) -> Result<TargetModel, TargetError> {
        if self.schema != TARGET_SCHEMA {
            return Err(TargetError::Parse(format!(
                "unsupported schema {:?}, expected {TARGET_SCHEMA:?}",
                self.schema
            )));
        }
        if self.components.len() != 2 {
            return Err(TargetError::Invalid("exactly two components required".into()));
        }
        let mut comps = Vec::new();
        for c in self.components {
            comps.push(ComponentModel {
                generators: c.generators,
                pushforward: c.pushforward,
                d_degree: c.d_degree,
                size: c.size,
                cohomology: c.cohomology.into_basis()?,
                restriction: parse_matrix(&c.restriction)?,
            });
        }
        let [c1, c2]: [ComponentModel; 2] = comps.try_into().expect("length checked");
        let t = TargetModel {
            class_rank: self.class_rank,
            components: [c1, c2],
            d_cohomology: self.d_cohomology.into_basis()?,
            x_cohomology: self.x_cohomology.into_basis()?,
        };
        t.validate()?;
        Ok(t)
    }

    fn from_model(t: &TargetModel) -> Self {
        TargetDoc {
            schema: TARGET_SCHEMA.into(),
            class_rank: t.class_rank,
            components: t
                .components
                .iter()
                .map(|c| ComponentDoc {
                    generators: c.generators.clone(),
                    pushforward: c.pushforward.clone(),
                    d_degree: c.d_degree.clone(),
                    size: c.size.clone(),
                    cohomology: BasisDoc::from_basis(&c.cohomology),
                    restriction: format_matrix(&c.restriction),
                })
                .collect(),
            d_cohomology: BasisDoc::from_basis(&t.d_cohomology),
            x_cohomology: BasisDoc::from_basis(&t.x_cohomology),
        }
    }
}

/// Small ready-made targets used by tests, the CLI and the verification suites.
pub mod fixtures {
    use super::*;

    fn point_basis() -> GradedBasis {
        GradedBasis::new(vec![BasisElement {
            name: "1".into(),
            degree: 0,
        }])
    }

    /// Two components with one generator each (`a1`, `a2`), `D`-degree 1,
    /// standard pushforward to `Z²` and size 1; `H*(X)` and `H*(X_i)` are
    /// point-like and `H*(D)` is `d_cohomology`.
    pub fn two_lines(d_cohomology: GradedBasis) -> TargetModel {
        let comp = |name: &str, col: Vec<i64>| ComponentModel {
            generators: vec![name.into()],
            pushforward: vec![col],
            d_degree: vec![1],
            size: vec![1],
            cohomology: point_basis(),
            restriction: vec![vec![Rat::one()]],
        };
        TargetModel {
            class_rank: 2,
            components: [comp("a1", vec![1, 0]), comp("a2", vec![0, 1])],
            d_cohomology,
            x_cohomology: point_basis(),
        }
    }

    /// Degree-graded cohomology `1, e` (with `e` odd of degree 1), `H*(X)`
    /// identical on both components, for sign tests.
    pub fn graded_two_lines(d_cohomology: GradedBasis) -> TargetModel {
        let basis = GradedBasis::new(vec![
            BasisElement {
                name: "1".into(),
                degree: 0,
            },
            BasisElement {
                name: "e".into(),
                degree: 1,
            },
            BasisElement {
                name: "f".into(),
                degree: 1,
            },
            BasisElement {
                name: "h".into(),
                degree: 2,
            },
        ]);
        let id: Vec<Vec<Rat>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
            .collect();
        let comp = |name: &str, col: Vec<i64>| ComponentModel {
            generators: vec![name.into()],
            pushforward: vec![col],
            d_degree: vec![1],
            size: vec![1],
            cohomology: basis.clone(),
            restriction: id.clone(),
        };
        TargetModel {
            class_rank: 2,
            components: [comp("a1", vec![1, 0]), comp("a2", vec![0, 1])],
            d_cohomology,
            x_cohomology: basis.clone(),
        }
    }

    /// An elliptic-curve-like `H*(D)`: `1` (deg 0), `α`, `β` (deg 1), `pt`
    /// (deg 2) with `∫ α β = 1 = -∫ β α`.
    pub fn odd_curve() -> GradedBasis {
        let r = |x: i64| rational::from_i64(x);
        GradedBasis::with_pairing(
            vec![
                BasisElement {
                    name: "1".into(),
                    degree: 0,
                },
                BasisElement {
                    name: "alpha".into(),
                    degree: 1,
                },
                BasisElement {
                    name: "beta".into(),
                    degree: 1,
                },
                BasisElement {
                    name: "pt".into(),
                    degree: 2,
                },
            ],
            vec![
                vec![r(0), r(0), r(0), r(1)],
                vec![r(0), r(0), r(1), r(0)],
                vec![r(0), r(-1), r(0), r(0)],
                vec![r(1), r(0), r(0), r(0)],
            ],
        )
        .expect("valid")
    }

    /// A small random target: one or two generators per component, an
    /// ambient lattice of rank one or two, point-like cohomology everywhere
    /// and `D`-degrees in `0..=2`. The size functional is pulled back from a
    /// positive covector so enumeration is always finite.
    pub fn random_target<R: rand::Rng>(rng: &mut R) -> TargetModel {
        let m = rng.gen_range(1..=2usize);
        let h: Vec<i64> = (0..m).map(|_| rng.gen_range(1..=2)).collect();
        let mut comp = |prefix: &str| {
            let k = rng.gen_range(1..=2usize);
            let mut pushforward = Vec::with_capacity(k);
            while pushforward.len() < k {
                let col: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=2)).collect();
                if col.iter().any(|&x| x > 0) {
                    pushforward.push(col);
                }
            }
            let size = pushforward
                .iter()
                .map(|col: &Vec<i64>| col.iter().zip(&h).map(|(a, b)| a * b).sum())
                .collect();
            ComponentModel {
                generators: (1..=k).map(|i| format!("{prefix}{i}")).collect(),
                pushforward,
                d_degree: (0..k).map(|_| rng.gen_range(0..=2)).collect(),
                size,
                cohomology: point_basis(),
                restriction: vec![vec![Rat::one()]],
            }
        };
        let c1 = comp("a");
        let c2 = comp("b");
        TargetModel {
            class_rank: m,
            components: [c1, c2],
            d_cohomology: GradedBasis::point(),
            x_cohomology: point_basis(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn sym(id: usize, degree: u32) -> Symbol {
        Symbol { id, degree }
    }

    #[test]
    fn dual_basis_of_point() {
        let d = dual_basis(&GradedBasis::point()).unwrap();
        assert_eq!(d, vec![GradedClass { coeffs: vec![Rat::one()] }]);
    }

    #[test]
    fn dual_basis_of_projective_line() {
        let b = GradedBasis::projective_line();
        let d = dual_basis(&b).unwrap();
        assert_eq!(d[0], b.basis_class(1));
        assert_eq!(d[1], b.basis_class(0));
    }

    #[test]
    fn dual_basis_defining_identity_with_rational_pairing() {
        let r = rational::ratio;
        let b = GradedBasis::with_pairing(
            vec![
                BasisElement { name: "1".into(), degree: 0 },
                BasisElement { name: "x".into(), degree: 2 },
                BasisElement { name: "y".into(), degree: 2 },
                BasisElement { name: "pt".into(), degree: 4 },
            ],
            vec![
                vec![r(0, 1), r(0, 1), r(0, 1), r(1, 1)],
                vec![r(0, 1), r(2, 3), r(1, 2), r(0, 1)],
                vec![r(0, 1), r(1, 2), r(-1, 5), r(0, 1)],
                vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)],
            ],
        )
        .unwrap();
        let p = b.pairing.clone().unwrap();
        let d = dual_basis(&b).unwrap();
        for (i, di) in d.iter().enumerate() {
            for j in 0..b.len() {
                // ∫ δ²_i δ¹_j = Σ_k c_ik P_kj
                let v: Rat = (0..b.len()).map(|k| &di.coeffs[k] * &p[k][j]).sum();
                assert_eq!(v, if i == j { Rat::one() } else { Rat::zero() });
            }
        }
    }

    #[test]
    fn singular_and_ungraded_pairings_rejected() {
        let e = |n: &str, d: u32| BasisElement { name: n.into(), degree: d };
        let r = rational::from_i64;
        let singular = GradedBasis::with_pairing(
            vec![e("1", 0), e("p", 2)],
            vec![vec![r(0), r(1)], vec![r(0), r(0)]],
        );
        assert_eq!(singular, Err(TargetError::SingularPairing));
        let ungraded = GradedBasis::with_pairing(
            vec![e("1", 0), e("p", 2)],
            vec![vec![r(1), r(1)], vec![r(1), r(0)]],
        );
        assert!(matches!(ungraded, Err(TargetError::NotGraded(..))));
    }

    #[test]
    fn diagonal_examples() {
        let d = diagonal_class(&GradedBasis::point(), &[0]).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].1.len(), 1);
        let b = GradedBasis::projective_line();
        let d = diagonal_class(&b, &[0]).unwrap();
        let pairs: Vec<(GradedClass, GradedClass)> =
            d[0].1.iter().map(|s| (s.first.clone(), s.second.clone())).collect();
        assert_eq!(
            pairs,
            vec![
                (b.basis_class(0), b.basis_class(1)),
                (b.basis_class(1), b.basis_class(0))
            ]
        );
        let d = diagonal_class(&b, &[0, 1]).unwrap();
        let tuples: usize = d.iter().map(|(_, s)| s.len()).product();
        assert_eq!(tuples, 4);
    }

    #[test]
    fn koszul_examples() {
        let even = [sym(0, 2), sym(1, 0), sym(2, 4)];
        let rev = [sym(2, 4), sym(0, 2), sym(1, 0)];
        assert_eq!(koszul_sign(&even, &rev).unwrap(), Sign::Plus);
        let odd = [sym(0, 1), sym(1, 3)];
        let swapped = [sym(1, 3), sym(0, 1)];
        assert_eq!(koszul_sign(&odd, &swapped).unwrap(), Sign::Minus);
        assert_eq!(koszul_sign(&odd, &odd).unwrap(), Sign::Plus);
        assert_eq!(
            koszul_sign(&odd, &[sym(0, 1), sym(7, 3)]),
            Err(TargetError::NotPermutation)
        );
        assert_eq!(
            koszul_sign(&odd, &[sym(0, 1)]),
            Err(TargetError::NotPermutation)
        );
    }

    #[test]
    fn restriction_examples() {
        let t = graded_two_lines(GradedBasis::point());
        let z = GradedClass::zero(4);
        assert_eq!(t.restrict(Side::One, &z).unwrap(), z);
        let c = TargetModel::parse_class(&t.x_cohomology, "2*e + 1/3*f").unwrap();
        assert_eq!(t.restrict(Side::Two, &c).unwrap(), c);
        assert!(t.restrict(Side::One, &GradedClass::zero(3)).is_err());
    }

    #[test]
    fn homogeneity() {
        let t = graded_two_lines(GradedBasis::point());
        let b = &t.x_cohomology;
        let c = TargetModel::parse_class(b, "e + f").unwrap();
        assert_eq!(c.homogeneous_degree(b).unwrap(), Some(1));
        let c = TargetModel::parse_class(b, "1 + e").unwrap();
        assert_eq!(c.homogeneous_degree(b), Err(TargetError::NonHomogeneous));
        assert_eq!(GradedClass::zero(4).homogeneous_degree(b).unwrap(), None);
    }

    #[test]
    fn descriptor_round_trip_and_validation() {
        let t = two_lines(GradedBasis::projective_line());
        let again = TargetModel::from_json(&t.to_json()).unwrap();
        assert_eq!(again, t);
        let bad = t.to_json().replace("\"size\": [\n        1\n      ]", "\"size\": [\n        0\n      ]");
        assert!(matches!(
            TargetModel::from_json(&bad),
            Err(TargetError::EnumerationNotFinite(_))
        ));
        assert!(matches!(
            TargetModel::from_json("{\"schema\": 3}"),
            Err(TargetError::Parse(_))
        ));
    }

    #[test]
    fn ambient_size_of_two_lines() {
        let t = two_lines(GradedBasis::point());
        assert_eq!(t.ambient_size().unwrap(), vec![Rat::one(), Rat::one()]);
        assert_eq!(t.size_bound(&[2, 3]).unwrap(), 5);
    }
}
