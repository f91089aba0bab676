//! Exact arithmetic on permutations of `{0, …, n-1}` for small degree.
//!
//! Composition is left-to-right throughout the crate: `compose(p, q)` applies
//! `p` first, so `compose(p, q).image(i) == q.image(p.image(i))`. Points are
//! 0-based internally; all text I/O uses 1-based cycle notation, plus a
//! 0-based image-list form (`[2,0,1]`) for machine round-trips.

use smallvec::SmallVec;
use std::fmt;
use thiserror::Error;

/// A point of the permutation domain. Degree is capped at 255 so a point
/// always fits in one byte, which keeps canonical-form keys compact.
pub type Point = u8;

/// Largest supported degree.
pub const MAX_DEGREE: usize = 255;

/// Inline storage covers degree <= 24 without heap allocation; M23 needs 23.
type Images = SmallVec<[u8; 24]>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("degree {0} exceeds the maximum of {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("images do not form a bijection: value {value} appears twice")]
    DuplicateImage { value: usize },
    #[error("image value {value} out of range for degree {degree}")]
    ImageOutOfRange { value: usize, degree: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("repeated point {point}")]
    RepeatedPoint { point: usize },
    #[error("point {point} out of range 1..={degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("malformed permutation: {0}")]
    Malformed(String),
    #[error(transparent)]
    Invalid(#[from] PermError),
}

/// A permutation of `{0, …, degree-1}`, stored by its image array.
///
/// Immutable after construction; cheap to clone and safe to share across
/// threads. Ordering and hashing go by the image array, so the lexicographic
/// minimum of a set of permutations is the lex-least image array.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Images,
}

impl Permutation {
    /// The identity permutation on `degree` points.
    pub fn identity(degree: usize) -> Self {
        assert!(degree <= MAX_DEGREE, "degree {degree} exceeds {MAX_DEGREE}");
        Permutation {
            images: (0..degree as u8).collect(),
        }
    }

    /// Builds a permutation from a full image array, validating that it is a
    /// bijection on `{0, …, len-1}`.
    pub fn from_images(images: &[u8]) -> Result<Self, PermError> {
        let degree = images.len();
        if degree > MAX_DEGREE {
            return Err(PermError::DegreeTooLarge(degree));
        }
        let mut seen = [false; 256];
        for &v in images {
            if v as usize >= degree {
                return Err(PermError::ImageOutOfRange {
                    value: v as usize,
                    degree,
                });
            }
            if seen[v as usize] {
                return Err(PermError::DuplicateImage { value: v as usize });
            }
            seen[v as usize] = true;
        }
        Ok(Permutation {
            images: SmallVec::from_slice(images),
        })
    }

    /// Internal constructor for image arrays already known to be bijections.
    pub(crate) fn from_images_unchecked(images: Images) -> Self {
        debug_assert!(Permutation::from_images(&images).is_ok());
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn image(&self, point: Point) -> Point {
        self.images[point as usize]
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    /// Left-to-right composition: apply `self`, then `q`.
    pub fn compose(&self, q: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != q.degree() {
            return Err(PermError::DegreeMismatch {
                left: self.degree(),
                right: q.degree(),
            });
        }
        Ok(self.mul(q))
    }

    /// Unchecked left-to-right composition for internal use where degrees are
    /// known to agree.
    #[inline]
    pub(crate) fn mul(&self, q: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), q.degree());
        let images = self.images.iter().map(|&v| q.images[v as usize]).collect();
        Permutation::from_images_unchecked(images)
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = smallvec::smallvec![0u8; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v as usize] = i as u8;
        }
        Permutation::from_images_unchecked(images)
    }

    /// Conjugate of `self` by `g`: applies `g⁻¹`, then `self`, then `g`.
    pub fn conjugate_by(&self, g: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != g.degree() {
            return Err(PermError::DegreeMismatch {
                left: self.degree(),
                right: g.degree(),
            });
        }
        Ok(self.conj(g))
    }

    #[inline]
    pub(crate) fn conj(&self, g: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), g.degree());
        let mut images = smallvec::smallvec![0u8; self.degree()];
        // (g⁻¹ · self · g)(g(i)) = g(self(i))
        for i in 0..self.degree() {
            images[g.images[i] as usize] = g.images[self.images[i] as usize];
        }
        Permutation::from_images_unchecked(images)
    }

    /// `self` raised to the power `k` (negative powers use the inverse).
    pub fn power(&self, k: i64) -> Permutation {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Order of the element: the least `k >= 1` with `self^k = identity`,
    /// computed as the lcm of the cycle lengths.
    pub fn order(&self) -> u64 {
        let mut order: u64 = 1;
        let mut seen = [false; 256];
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len: u64 = 0;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p] as usize;
                len += 1;
            }
            order = num_integer::lcm(order, len);
        }
        order
    }

    /// Nontrivial cycles, each rotated to start at its smallest point and
    /// listed in increasing order of that point.
    pub fn cycles(&self) -> Vec<Vec<Point>> {
        let mut seen = [false; 256];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p as u8);
                p = self.images[p] as usize;
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut seen = [false; 256];
        let mut lengths = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len: u8 = 0;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p] as usize;
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable();
        CycleType { lengths }
    }

    /// Number of points moved by the permutation.
    pub fn support_size(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &v)| i != v as usize)
            .count()
    }

    /// Parses either 1-based cycle notation (`"(1,2)(3,4,5)"`, `"()"` for the
    /// identity) or a 0-based image list (`"[1,0,2]"`). Whitespace-tolerant.
    pub fn parse(text: &str, degree: usize) -> Result<Permutation, ParseError> {
        let t = text.trim();
        if t.starts_with('[') {
            Self::parse_images(t, degree)
        } else {
            Self::parse_cycles(t, degree)
        }
    }

    /// Parses 1-based disjoint-cycle notation.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation, ParseError> {
        if degree > MAX_DEGREE {
            return Err(PermError::DegreeTooLarge(degree).into());
        }
        let mut images: Images = (0..degree as u8).collect();
        let mut used = [false; 256];
        let mut chars = text.char_indices().peekable();
        let mut any_cycle = false;
        while let Some(&(_, c)) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
                continue;
            }
            if c != '(' {
                return Err(ParseError::Malformed(format!(
                    "expected '(' but found {c:?}"
                )));
            }
            chars.next();
            any_cycle = true;
            let mut cycle: Vec<u8> = Vec::new();
            let mut num: Option<usize> = None;
            let mut pending_comma = false;
            macro_rules! commit {
                () => {
                    if let Some(n) = num.take() {
                        if n == 0 || n > degree {
                            return Err(ParseError::PointOutOfRange { point: n, degree });
                        }
                        if used[n - 1] {
                            return Err(ParseError::RepeatedPoint { point: n });
                        }
                        used[n - 1] = true;
                        cycle.push((n - 1) as u8);
                        pending_comma = false;
                    }
                };
            }
            loop {
                match chars.next() {
                    None => return Err(ParseError::Malformed("unclosed cycle".into())),
                    Some((_, d)) if d.is_ascii_digit() => {
                        num = Some(num.unwrap_or(0) * 10 + (d as usize - '0' as usize));
                        if num.unwrap() > MAX_DEGREE {
                            return Err(ParseError::PointOutOfRange {
                                point: num.unwrap(),
                                degree,
                            });
                        }
                    }
                    Some((_, d)) if d.is_whitespace() => commit!(),
                    Some((_, ',')) => {
                        commit!();
                        if cycle.is_empty() || pending_comma {
                            return Err(ParseError::Malformed("empty entry in cycle".into()));
                        }
                        pending_comma = true;
                    }
                    Some((_, ')')) => {
                        commit!();
                        if pending_comma {
                            return Err(ParseError::Malformed("trailing comma in cycle".into()));
                        }
                        break;
                    }
                    Some((_, d)) => {
                        return Err(ParseError::Malformed(format!("unexpected {d:?}")));
                    }
                }
            }
            if cycle.len() == 1 {
                return Err(ParseError::Malformed(
                    "cycle of length 1 (fixed points are implicit)".into(),
                ));
            }
            for w in 0..cycle.len() {
                let from = cycle[w] as usize;
                let to = cycle[(w + 1) % cycle.len()];
                images[from] = to;
            }
        }
        if !any_cycle {
            return Err(ParseError::Malformed("empty input".into()));
        }
        Ok(Permutation::from_images_unchecked(images))
    }

    /// Parses the 0-based image-list form `[i0,i1,…]`; its length must equal
    /// the expected degree.
    pub fn parse_images(text: &str, degree: usize) -> Result<Permutation, ParseError> {
        let t = text.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| ParseError::Malformed("image list must be bracketed".into()))?;
        let mut images = Vec::new();
        for part in inner.split(',') {
            let part = part.trim();
            if part.is_empty() {
                if inner.trim().is_empty() {
                    break;
                }
                return Err(ParseError::Malformed("empty entry in image list".into()));
            }
            let v: usize = part
                .parse()
                .map_err(|_| ParseError::Malformed(format!("bad image entry {part:?}")))?;
            if v > MAX_DEGREE {
                return Err(PermError::ImageOutOfRange {
                    value: v,
                    degree,
                }
                .into());
            }
            images.push(v as u8);
        }
        if images.len() != degree {
            return Err(ParseError::Malformed(format!(
                "image list has length {} but degree is {degree}",
                images.len()
            )));
        }
        Ok(Permutation::from_images(&images)?)
    }

    /// 1-based disjoint-cycle rendering; the identity prints as `"()"`.
    pub fn format_cycles(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        let mut out = String::new();
        for cycle in cycles {
            out.push('(');
            for (i, p) in cycle.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&(p + 1).to_string());
            }
            out.push(')');
        }
        out
    }

    /// 0-based image-list rendering, e.g. `[2,0,1]`.
    pub fn format_images(&self) -> String {
        let body: Vec<String> = self.images.iter().map(|v| v.to_string()).collect();
        format!("[{}]", body.join(","))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_cycles())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({})", self.format_cycles())
    }
}

/// Multiset of cycle lengths (fixed points included), in sorted order.
/// Conjugation-invariant, so it doubles as a cheap class invariant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycleType {
    lengths: Vec<u8>,
}

impl CycleType {
    pub fn lengths(&self) -> &[u8] {
        &self.lengths
    }

    pub fn degree(&self) -> usize {
        self.lengths.iter().map(|&l| l as usize).sum()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.lengths.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]", body.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, degree: usize) -> Permutation {
        Permutation::parse(text, degree).unwrap()
    }

    #[test]
    fn compose_is_left_to_right() {
        // This pins the composition convention for the whole crate: apply the
        // left factor first.
        let a = p("(1,2)", 3);
        let b = p("(2,3)", 3);
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.images(), &[2, 0, 1]);
        assert_eq!(ab.format_cycles(), "(1,3,2)");
    }

    #[test]
    fn identity_laws() {
        let id = Permutation::identity(5);
        let q = p("(1,2)(3,4,5)", 5);
        assert_eq!(id.compose(&q).unwrap(), q);
        assert_eq!(q.compose(&id).unwrap(), q);
        assert_eq!(q.compose(&q.inverse()).unwrap(), id);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Permutation::identity(4).inverse(), Permutation::identity(4));
        let t = p("(1,2)", 4);
        assert_eq!(t.inverse(), t);
        assert_eq!(p("(1,2,3)", 3).inverse(), p("(1,3,2)", 3));
    }

    #[test]
    fn degree_mismatch_rejected() {
        let a = Permutation::identity(3);
        let b = Permutation::identity(4);
        assert!(matches!(
            a.compose(&b),
            Err(PermError::DegreeMismatch { left: 3, right: 4 })
        ));
    }

    #[test]
    fn element_order() {
        assert_eq!(Permutation::identity(6).order(), 1);
        assert_eq!(p("(1,2)(3,4,5)", 5).order(), 6);
        let c23: Vec<u8> = (0..23).map(|i| ((i + 1) % 23) as u8).collect();
        assert_eq!(Permutation::from_images(&c23).unwrap().order(), 23);
    }

    #[test]
    fn parse_and_format() {
        assert!(p("()", 5).is_identity());
        assert_eq!(p("(1,2)(3,4,5)", 5).images(), &[1, 0, 3, 4, 2]);
        assert_eq!(p(" ( 1 , 2 ) ( 3 4 5 ) ", 5).images(), &[1, 0, 3, 4, 2]);
        assert_eq!(p("[1,0,3,4,2]", 5).format_cycles(), "(1,2)(3,4,5)");
        assert_eq!(Permutation::identity(5).format_cycles(), "()");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Permutation::parse("(1,1,2)", 5),
            Err(ParseError::RepeatedPoint { point: 1 })
        ));
        assert!(matches!(
            Permutation::parse("(1,2)(2,3)", 5),
            Err(ParseError::RepeatedPoint { point: 2 })
        ));
        assert!(matches!(
            Permutation::parse("(1,6)", 5),
            Err(ParseError::PointOutOfRange { point: 6, degree: 5 })
        ));
        assert!(matches!(
            Permutation::parse("(0,1)", 5),
            Err(ParseError::PointOutOfRange { point: 0, degree: 5 })
        ));
        assert!(Permutation::parse("(1,2", 5).is_err());
        assert!(Permutation::parse("", 5).is_err());
        assert!(Permutation::parse("[0,0,1]", 3).is_err());
        assert!(Permutation::parse("[0,1]", 3).is_err());
    }

    #[test]
    fn cycle_type_and_support() {
        let q = p("(1,2)(3,4,5)", 7);
        assert_eq!(q.cycle_type().lengths(), &[1, 1, 2, 3]);
        assert_eq!(q.support_size(), 5);
        assert_eq!(q.cycle_type().degree(), 7);
    }

    #[test]
    fn conjugation_matches_definition() {
        let x = p("(1,2,3)", 5);
        let g = p("(1,4)(2,5)", 5);
        let direct = g.inverse().mul(&x).mul(&g);
        assert_eq!(x.conjugate_by(&g).unwrap(), direct);
    }
}
