//! Positive factorizations and their homology images.

use std::sync::Arc;

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::homology::{HomologyClass, SpMatrix};
use crate::letter::Letter;

/// An ordered product of positive Dehn twists on a fixed surface. The
/// word `t_1 t_2 ... t_m` composes with `t_m` acting on the surface
/// first; its homology image is the product of the letters' transvection
/// matrices in writing order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Factorization {
    pub genus: usize,
    pub boundary: usize,
    pub letters: Vec<Letter>,
}

impl Factorization {
    pub fn new(genus: usize, boundary: usize, letters: Vec<Letter>) -> Self {
        Factorization {
            genus,
            boundary,
            letters,
        }
    }

    pub fn empty(genus: usize, boundary: usize) -> Self {
        Self::new(genus, boundary, vec![])
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn catalog(&self) -> Result<Arc<Catalog>> {
        Catalog::for_surface(self.genus, self.boundary)
    }

    /// Homology image of the whole word.
    pub fn image(&self, cat: &Catalog) -> Result<SpMatrix> {
        cat.letters_matrix(&self.letters)
    }

    /// Whether the image is the identity (necessary condition for the
    /// word being a relator; the representation is not faithful, so this
    /// is never treated as a proof of triviality in the group).
    pub fn is_homology_relator(&self, cat: &Catalog) -> Result<bool> {
        Ok(self.image(cat)?.is_identity())
    }

    /// Effective classes of all letters, in order.
    pub fn effective_classes(&self, cat: &Catalog) -> Result<Vec<HomologyClass>> {
        self.letters
            .iter()
            .map(|l| l.effective_class(cat))
            .collect()
    }

    /// Normalize every letter.
    pub fn normalized(&self, cat: &Catalog) -> Factorization {
        Factorization {
            genus: self.genus,
            boundary: self.boundary,
            letters: self.letters.iter().map(|l| l.normalize(cat)).collect(),
        }
    }

    /// Letterwise equality after normalization.
    pub fn same_word(&self, other: &Factorization, cat: &Catalog) -> bool {
        self.genus == other.genus
            && self.boundary == other.boundary
            && self.len() == other.len()
            && self
                .normalized(cat)
                .letters
                .iter()
                .zip(&other.normalized(cat).letters)
                .all(|(a, b)| a == b)
    }

    /// Equality as cyclic words (letterwise, after normalization).
    pub fn same_cyclic_word(&self, other: &Factorization, cat: &Catalog) -> bool {
        if self.len() != other.len() {
            return false;
        }
        if self.is_empty() {
            return true;
        }
        let a = self.normalized(cat).letters;
        let b = other.normalized(cat).letters;
        (0..a.len()).any(|k| (0..a.len()).all(|i| a[(k + i) % a.len()] == b[i]))
    }

    /// Project a bounded-surface word to the closed surface: boundary
    /// letters are deleted, every other name is mapped through its
    /// registered projection.
    pub fn project(&self, cat: &Catalog, closed: &Catalog) -> Result<Factorization> {
        if self.boundary == 0 {
            return Ok(self.clone());
        }
        let map_curve = |id| -> Result<Option<crate::catalog::CurveId>> {
            let e = cat.entry(cat.resolve_alias(id));
            if e.central {
                return Ok(None);
            }
            match &e.projection {
                Some(name) => Ok(Some(closed.id(name)?)),
                None => Err(Error::UnknownCurve(format!(
                    "{} has no closed-surface projection",
                    e.name
                ))),
            }
        };
        let mut letters = vec![];
        for l in &self.letters {
            let Some(base) = map_curve(l.base)? else {
                continue; // boundary twist letters vanish downstairs
            };
            let mut conj = vec![];
            for t in &l.conj {
                if let Some(c) = map_curve(t.curve)? {
                    conj.push(crate::letter::Tok::new(c, t.exp));
                }
            }
            letters.push(Letter::conjugated(conj, base));
        }
        Ok(Factorization::new(self.genus, 0, letters))
    }
}
