//! Free-group words, link-group presentations, abelianization data, and Fox
//! free differential calculus.
//!
//! Everything here is exact integer/symbolic algebra: words are stored freely
//! reduced, and Fox derivatives live in the integral group ring of the free
//! group. The numerical pipeline only enters later, when group-ring elements
//! are pushed through a representation.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Errors from word parsing and presentation/abelianization validation.
#[derive(Debug, Error)]
pub enum WordError {
    /// A token refers to a generator that was never declared.
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    /// A token is not `name`, `name^-1`, or an uppercase inverse shorthand.
    #[error("malformed word token `{0}`")]
    MalformedToken(String),
    /// A relator equation contains more than one `=`.
    #[error("relator `{0}` has more than one `=`")]
    MalformedEquation(String),
    /// Generator names must be unique.
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    /// Component labels must cover 0..b without gaps.
    #[error("component labels are not contiguous from 0")]
    NonContiguousComponents,
    /// Abelianization data incompatible with the presentation.
    #[error("invalid abelianization exponents: {0}")]
    BadAlpha(String),
}

/// A named meridian generator tagged with the link component it belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    /// Identifier used in word syntax.
    pub name: String,
    /// Index of the link component whose meridian this generator represents.
    pub component: usize,
}

/// A freely reduced word in the free group on a presentation's generators.
///
/// Letters are `(generator index, ±1)` pairs; the empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    letters: Vec<(usize, i8)>,
}

impl Word {
    /// The identity word.
    pub fn identity() -> Self {
        Word::default()
    }

    /// Builds a word from letters, freely reducing adjacent inverse pairs.
    pub fn from_letters<I: IntoIterator<Item = (usize, i8)>>(letters: I) -> Self {
        let mut w = Word::identity();
        for (g, s) in letters {
            w.push(g, s);
        }
        w
    }

    /// Appends one letter, cancelling against the current last letter.
    pub fn push(&mut self, gen: usize, sign: i8) {
        debug_assert!(sign == 1 || sign == -1);
        match self.letters.last() {
            Some(&(g, s)) if g == gen && s == -sign => {
                self.letters.pop();
            }
            _ => self.letters.push((gen, sign)),
        }
    }

    /// Concatenation followed by free reduction at the seam.
    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(g, s) in &other.letters {
            w.push(g, s);
        }
        w
    }

    /// The inverse word (letters reversed, signs flipped).
    pub fn inverse(&self) -> Word {
        Word {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|&(g, s)| (g, -s))
                .collect(),
        }
    }

    /// Letter sequence access.
    pub fn letters(&self) -> &[(usize, i8)] {
        &self.letters
    }

    /// Word length after free reduction.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// True for the identity word.
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Renders the word in the input grammar (inverse as `name^-1`).
    pub fn display(&self, gens: &[Generator]) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        self.letters
            .iter()
            .map(|&(g, s)| {
                let name = &gens[g].name;
                if s == 1 {
                    name.clone()
                } else {
                    format!("{name}^-1")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A finitely presented group: generators with component labels plus relators.
#[derive(Clone, Debug)]
pub struct Presentation {
    /// Declared generators in input order.
    pub generators: Vec<Generator>,
    /// Freely reduced relator words.
    pub relators: Vec<Word>,
    /// Number of link components `b`.
    pub component_count: usize,
}

impl Presentation {
    /// Validates generator names/components and assembles the presentation.
    pub fn new(generators: Vec<Generator>, relators: Vec<Word>) -> Result<Self, WordError> {
        for (i, g) in generators.iter().enumerate() {
            if generators[..i].iter().any(|h| h.name == g.name) {
                return Err(WordError::DuplicateGenerator(g.name.clone()));
            }
        }
        let mut seen = vec![false; generators.len()];
        let mut max_comp = 0usize;
        for g in &generators {
            if g.component >= seen.len() {
                return Err(WordError::NonContiguousComponents);
            }
            seen[g.component] = true;
            max_comp = max_comp.max(g.component);
        }
        if generators.is_empty() || !seen[..=max_comp].iter().all(|&s| s) {
            return Err(WordError::NonContiguousComponents);
        }
        Ok(Presentation {
            generators,
            relators,
            component_count: max_comp + 1,
        })
    }

    /// `#generators − #relators`; the invariant pipeline needs deficiency 1.
    pub fn deficiency(&self) -> i64 {
        self.generators.len() as i64 - self.relators.len() as i64
    }

    /// Index of a generator by name.
    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Parses one word in the token grammar against this presentation.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let mut word = Word::identity();
        for token in text.split_whitespace() {
            let (base, mut sign) = match token.strip_suffix("^-1") {
                Some(prefix) => (prefix, -1i8),
                None => (token, 1i8),
            };
            if base.is_empty() || base.contains('^') {
                return Err(WordError::MalformedToken(token.to_string()));
            }
            let idx = match self.generator_index(base) {
                Some(i) => i,
                None => {
                    // Uppercase single-letter shorthand: `A` means `a^-1`.
                    let lower = base.to_lowercase();
                    let is_single_upper =
                        base.chars().count() == 1 && base.chars().all(|c| c.is_uppercase());
                    match (is_single_upper, self.generator_index(&lower)) {
                        (true, Some(i)) => {
                            sign = -sign;
                            i
                        }
                        _ => return Err(WordError::UnknownGenerator(base.to_string())),
                    }
                }
            };
            word.push(idx, sign);
        }
        Ok(word)
    }

    /// Parses a relator, accepting either a single word or `lhs = rhs`
    /// (stored as `lhs·rhs⁻¹`).
    pub fn parse_relator(&self, text: &str) -> Result<Word, WordError> {
        let sides: Vec<&str> = text.split('=').collect();
        match sides.as_slice() {
            [w] => self.parse_word(w),
            [lhs, rhs] => Ok(self.parse_word(lhs)?.concat(&self.parse_word(rhs)?.inverse())),
            _ => Err(WordError::MalformedEquation(text.to_string())),
        }
    }
}

/// Parses generator declarations and relator strings into a [`Presentation`].
///
/// Relators that reduce to the identity are dropped; a warning string is
/// returned for each.
pub fn parse_presentation(
    generators: Vec<Generator>,
    relator_texts: &[String],
) -> Result<(Presentation, Vec<String>), WordError> {
    let shell = Presentation::new(generators, Vec::new())?;
    let mut relators = Vec::new();
    let mut warnings = Vec::new();
    for text in relator_texts {
        let w = shell.parse_relator(text)?;
        if w.is_empty() {
            warnings.push(format!("relator `{text}` reduces to the identity; dropped"));
        } else {
            relators.push(w);
        }
    }
    Ok((
        Presentation {
            relators,
            ..shell
        },
        warnings,
    ))
}

/// The abelianization map α: sends the meridian of component ℓ to t^{a(ℓ)}.
#[derive(Clone, Debug)]
pub struct AlphaMap {
    /// Exponent a(ℓ) per link component.
    pub per_component: Vec<i64>,
    /// Induced exponent per generator (a of that generator's component).
    pub per_generator: Vec<i64>,
}

impl AlphaMap {
    /// Builds α from per-component exponents, checking the structural
    /// preconditions (count and positivity). Surjectivity (gcd 1) is a
    /// mathematical judgment left to [`validate_presentation`], so that a
    /// failing input is diagnosed in its report rather than refused here.
    pub fn new(p: &Presentation, per_component: Vec<i64>) -> Result<Self, WordError> {
        if per_component.len() != p.component_count {
            return Err(WordError::BadAlpha(format!(
                "{} exponents for {} components",
                per_component.len(),
                p.component_count
            )));
        }
        if per_component.iter().any(|&a| a < 1) {
            return Err(WordError::BadAlpha("exponents must be ≥ 1".into()));
        }
        let per_generator = p
            .generators
            .iter()
            .map(|g| per_component[g.component])
            .collect();
        Ok(AlphaMap {
            per_component,
            per_generator,
        })
    }

    /// Degree of a word under α: sum of letter signs times exponents.
    pub fn degree(&self, w: &Word) -> i64 {
        w.letters()
            .iter()
            .map(|&(g, s)| s as i64 * self.per_generator[g])
            .sum()
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// An element of the integral group ring ℤ[F] of the free group.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GroupRingElement {
    terms: BTreeMap<Word, i64>,
}

impl GroupRingElement {
    /// The zero element.
    pub fn zero() -> Self {
        GroupRingElement::default()
    }

    /// The identity group element with coefficient 1.
    pub fn one() -> Self {
        GroupRingElement::from_word(Word::identity())
    }

    /// A single word with coefficient 1.
    pub fn from_word(w: Word) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w, 1);
        GroupRingElement { terms }
    }

    /// Adds `coeff·w` in place, dropping zero coefficients.
    pub fn add_term(&mut self, w: Word, coeff: i64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if *e.get() == 0 {
                    e.remove();
                }
            }
            Entry::Vacant(v) => {
                if coeff != 0 {
                    v.insert(coeff);
                }
            }
        }
    }

    /// Term iterator: `(word, coefficient)` pairs with nonzero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    /// Number of stored terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// True for the zero element.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Ring sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }

    /// Ring difference.
    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), -c);
        }
        out
    }

    /// Ring product: words multiply by concatenation with free reduction.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = GroupRingElement::zero();
        for (u, a) in self.terms() {
            for (v, b) in other.terms() {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }

    /// Left-multiplies by a single word.
    pub fn mul_word_left(&self, w: &Word) -> Self {
        let mut out = GroupRingElement::zero();
        for (u, c) in self.terms() {
            out.add_term(w.concat(u), c);
        }
        out
    }

    /// The element `x − 1` for a generator `x`.
    pub fn generator_minus_one(gen: usize) -> Self {
        let mut e = GroupRingElement::from_word(Word::from_letters([(gen, 1)]));
        e.add_term(Word::identity(), -1);
        e
    }
}

/// Fox free derivative ∂w/∂x of a word with respect to one generator.
///
/// Satisfies ∂x/∂x = 1, ∂x⁻¹/∂x = −x⁻¹, and the product rule
/// ∂(uv)/∂x = ∂u/∂x + u·∂v/∂x.
pub fn fox_derivative(w: &Word, gen: usize) -> GroupRingElement {
    let mut out = GroupRingElement::zero();
    let mut prefix = Word::identity();
    for &(g, s) in w.letters() {
        if g == gen {
            if s == 1 {
                out.add_term(prefix.clone(), 1);
            } else {
                out.add_term(prefix.concat(&Word::from_letters([(g, -1)])), -1);
            }
        }
        prefix.push(g, s);
    }
    out
}

/// Structured result of presentation/abelianization validation.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    /// `#generators − #relators`.
    pub deficiency: i64,
    /// Whether the α exponents generate ℤ (gcd 1).
    pub alpha_surjective: bool,
    /// Relators whose α-degree is nonzero, with the offending degree.
    pub nonzero_relator_degrees: Vec<(usize, i64)>,
    /// Human-readable failure descriptions; empty means all checks passed.
    pub issues: Vec<String>,
}

impl ValidationReport {
    /// True when every check passed and the deficiency is 1.
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks deficiency, α surjectivity, and α(relator) = 0 for all relators.
pub fn validate_presentation(p: &Presentation, alpha: &AlphaMap) -> ValidationReport {
    let mut issues = Vec::new();
    let deficiency = p.deficiency();
    if deficiency != 1 {
        issues.push(format!(
            "deficiency is {deficiency}, but the invariant pipeline needs deficiency 1"
        ));
    }
    let gcd = alpha
        .per_component
        .iter()
        .fold(0i64, |g, &a| gcd_i64(g, a));
    let alpha_surjective = gcd == 1;
    if !alpha_surjective {
        issues.push(format!(
            "abelianization exponents have gcd {gcd}; the map onto ⟨t⟩ is not surjective"
        ));
    }
    let mut nonzero = Vec::new();
    for (i, r) in p.relators.iter().enumerate() {
        let d = alpha.degree(r);
        if d != 0 {
            nonzero.push((i, d));
            issues.push(format!("relator {i} has nonzero abelianized degree {d}"));
        }
    }
    ValidationReport {
        deficiency,
        alpha_surjective,
        nonzero_relator_degrees: nonzero,
        issues,
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "deficiency: {}", self.deficiency)?;
        writeln!(
            f,
            "abelianization surjective: {}",
            if self.alpha_surjective { "yes" } else { "no" }
        )?;
        if self.issues.is_empty() {
            write!(f, "all checks passed")
        } else {
            for issue in &self.issues {
                writeln!(f, "issue: {issue}")?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_gen() -> Presentation {
        Presentation::new(
            vec![
                Generator {
                    name: "a".into(),
                    component: 0,
                },
                Generator {
                    name: "b".into(),
                    component: 0,
                },
            ],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn parses_equation_relator_to_length_ten() {
        let p = two_gen();
        let r = p
            .parse_relator("a b^-1 a^-1 b a = b a b^-1 a^-1 b")
            .unwrap();
        assert_eq!(r.len(), 10);
    }

    #[test]
    fn uppercase_shorthand_is_inverse() {
        let p = two_gen();
        let w1 = p.parse_word("a B a").unwrap();
        let w2 = p.parse_word("a b^-1 a").unwrap();
        assert_eq!(w1, w2);
    }

    #[test]
    fn identity_relator_dropped_with_warning() {
        let gens = two_gen().generators;
        let (p, warnings) = parse_presentation(gens, &["a A".to_string()]).unwrap();
        assert!(p.relators.is_empty());
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn unknown_generator_is_an_error() {
        let p = two_gen();
        assert!(matches!(
            p.parse_word("a c"),
            Err(WordError::UnknownGenerator(_))
        ));
    }

    #[test]
    fn free_reduction_is_idempotent_on_rebuilt_words() {
        let p = two_gen();
        let w = p.parse_word("a b b^-1 a a^-1 b").unwrap();
        let rebuilt = Word::from_letters(w.letters().iter().copied());
        assert_eq!(w, rebuilt);
        assert_eq!(w, p.parse_word("a b").unwrap());
    }

    #[test]
    fn inverse_concat_cancels() {
        let p = two_gen();
        let w = p.parse_word("a b a^-1 b a").unwrap();
        assert!(w.concat(&w.inverse()).is_empty());
    }

    #[test]
    fn fox_axioms() {
        let a = Word::from_letters([(0, 1)]);
        let a_inv = Word::from_letters([(0, -1)]);
        assert_eq!(fox_derivative(&a, 0), GroupRingElement::one());
        let mut expect = GroupRingElement::zero();
        expect.add_term(a_inv.clone(), -1);
        assert_eq!(fox_derivative(&a_inv, 0), expect);
        assert!(fox_derivative(&a, 1).is_zero());
    }

    #[test]
    fn fox_of_commutator_matches_hand_computation() {
        // ∂(aba⁻¹b⁻¹)/∂a = 1 − aba⁻¹.
        let p = two_gen();
        let w = p.parse_word("a b a^-1 b^-1").unwrap();
        let d = fox_derivative(&w, 0);
        let mut expect = GroupRingElement::one();
        expect.add_term(p.parse_word("a b a^-1").unwrap(), -1);
        assert_eq!(d, expect);
    }

    #[test]
    fn fox_product_rule_on_fixed_pair() {
        let p = two_gen();
        let u = p.parse_word("a b^-1 a").unwrap();
        let v = p.parse_word("b a^-1 b^-1 a").unwrap();
        for gen in 0..2 {
            let lhs = fox_derivative(&u.concat(&v), gen);
            let rhs = fox_derivative(&u, gen).add(&fox_derivative(&v, gen).mul_word_left(&u));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn fundamental_identity_on_figure_eight_relator() {
        // Σ_j (∂r/∂x_j)(x_j − 1) = r − 1 exactly in ℤ[F].
        let p = two_gen();
        let r = p
            .parse_relator("a b^-1 a^-1 b a = b a b^-1 a^-1 b")
            .unwrap();
        let mut lhs = GroupRingElement::zero();
        for gen in 0..2 {
            lhs = lhs.add(&fox_derivative(&r, gen).mul(&GroupRingElement::generator_minus_one(gen)));
        }
        let rhs = GroupRingElement::from_word(r).sub(&GroupRingElement::one());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn alpha_degree_is_additive_and_kills_relators() {
        let p = two_gen();
        let alpha = AlphaMap::new(&p, vec![1]).unwrap();
        let u = p.parse_word("a b").unwrap();
        let v = p.parse_word("b^-1 a^-1 b").unwrap();
        assert_eq!(
            alpha.degree(&u.concat(&v)),
            alpha.degree(&u) + alpha.degree(&v)
        );
        let r = p
            .parse_relator("a b^-1 a^-1 b a = b a b^-1 a^-1 b")
            .unwrap();
        assert_eq!(alpha.degree(&r), 0);
    }

    #[test]
    fn validation_flags_non_surjective_exponents() {
        let mut gens = two_gen().generators;
        gens[1].component = 0;
        let (p, _) = parse_presentation(
            gens,
            &["a b^-1 a^-1 b a = b a b^-1 a^-1 b".to_string()],
        )
        .unwrap();
        // Construction accepts the exponents; validation names the problem.
        let alpha = AlphaMap::new(&p, vec![2]).unwrap();
        let report = validate_presentation(&p, &alpha);
        assert!(!report.alpha_surjective);
        assert!(!report.passed());
        assert!(report.issues.iter().any(|i| i.contains("surjective")));
        assert!(AlphaMap::new(&p, vec![0]).is_err());
        assert!(AlphaMap::new(&p, vec![1, 1]).is_err());
    }

    #[test]
    fn validation_flags_wrong_deficiency() {
        let p = two_gen();
        let alpha = AlphaMap::new(&p, vec![1]).unwrap();
        let report = validate_presentation(&p, &alpha);
        assert_eq!(report.deficiency, 2);
        assert!(!report.passed());
    }

    #[test]
    fn validation_passes_on_figure_eight_presentation() {
        let gens = two_gen().generators;
        let (p, _) = parse_presentation(
            gens,
            &["a b^-1 a^-1 b a = b a b^-1 a^-1 b".to_string()],
        )
        .unwrap();
        let alpha = AlphaMap::new(&p, vec![1]).unwrap();
        let report = validate_presentation(&p, &alpha);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn group_ring_product_is_associative_on_sample() {
        let p = two_gen();
        let x = GroupRingElement::from_word(p.parse_word("a b").unwrap())
            .add(&GroupRingElement::one());
        let y = GroupRingElement::generator_minus_one(1);
        let z = GroupRingElement::from_word(p.parse_word("b^-1 a").unwrap());
        assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
    }
}
