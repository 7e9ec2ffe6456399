//! Letters of a positive factorization.
//!
//! A letter `(w, c)` denotes the positive twist `w t_c w^{-1}`, i.e. the
//! twist about the curve `w(c)`. Conjugators are signed words over catalog
//! names, stored run-compressed and freely reduced.

use crate::catalog::{Catalog, CurveId};
use crate::error::Result;
use crate::homology::HomologyClass;

/// One run `curve^exp` inside a conjugator, `exp != 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Tok {
    pub curve: CurveId,
    pub exp: i64,
}

impl Tok {
    pub fn new(curve: CurveId, exp: i64) -> Self {
        Tok { curve, exp }
    }
}

/// Freely reduce a token word in place: merge adjacent runs of the same
/// curve and drop empty runs.
pub fn reduce_tokens(toks: &mut Vec<Tok>) {
    let mut out: Vec<Tok> = Vec::with_capacity(toks.len());
    for t in toks.drain(..) {
        if t.exp == 0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.curve == t.curve => {
                last.exp += t.exp;
                if last.exp == 0 {
                    out.pop();
                }
            }
            _ => out.push(t),
        }
    }
    *toks = out;
}

/// The inverse word: reversed order, negated exponents.
pub fn invert_tokens(toks: &[Tok]) -> Vec<Tok> {
    toks.iter()
        .rev()
        .map(|t| Tok::new(t.curve, -t.exp))
        .collect()
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    pub conj: Vec<Tok>,
    pub base: CurveId,
}

impl Letter {
    pub fn plain(base: CurveId) -> Self {
        Letter { conj: vec![], base }
    }

    pub fn conjugated(conj: Vec<Tok>, base: CurveId) -> Self {
        let mut l = Letter { conj, base };
        reduce_tokens(&mut l.conj);
        l
    }

    /// The letter as a signed token word: `w c w^{-1}`.
    pub fn as_tokens(&self) -> Vec<Tok> {
        let mut w = self.conj.clone();
        w.push(Tok::new(self.base, 1));
        w.extend(invert_tokens(&self.conj));
        reduce_tokens(&mut w);
        w
    }

    /// Inverse of the letter as a signed token word.
    pub fn as_tokens_inv(&self) -> Vec<Tok> {
        let mut w = self.conj.clone();
        w.push(Tok::new(self.base, -1));
        w.extend(invert_tokens(&self.conj));
        reduce_tokens(&mut w);
        w
    }

    /// Homology class of the underlying curve: Sp(conj) applied to the
    /// class of the base.
    pub fn effective_class(&self, cat: &Catalog) -> Result<HomologyClass> {
        cat.apply_tokens(&self.conj, &cat.class_of(self.base).clone())
    }

    /// Fully expand derived-curve recipes (base and conjugator tokens) and
    /// resolve aliases, yielding tokens over primitive curves only.
    pub fn expand(&self, cat: &Catalog) -> Letter {
        let mut conj = expand_tokens(&self.conj, cat);
        let mut base = cat.resolve_alias(self.base);
        while let Some((rec, b)) = cat.recipe_of(base) {
            conj.extend(expand_tokens(rec, cat));
            base = cat.resolve_alias(b);
        }
        Letter::conjugated(conj, base)
    }

    /// Canonical form: expand, then simplify (strip tokens that provably
    /// fix the curve, push registered shift words through), then compress
    /// innermost recipe suffixes back into derived-curve names.
    pub fn normalize(&self, cat: &Catalog) -> Letter {
        let mut l = self.expand(cat);
        simplify(&mut l, cat);
        compress(&mut l, cat);
        l
    }
}

fn expand_token_into(t: Tok, cat: &Catalog, out: &mut Vec<Tok>) {
    let id = cat.resolve_alias(t.curve);
    match cat.recipe_of(id) {
        None => out.push(Tok::new(id, t.exp)),
        Some((rec, base)) => {
            // w t_c^e w^{-1} with the recipe conjugator itself expanded.
            let rec = expand_tokens(rec, cat);
            out.extend(rec.iter().copied());
            expand_token_into(Tok::new(base, t.exp), cat, out);
            out.extend(invert_tokens(&rec));
        }
    }
}

fn expand_tokens(toks: &[Tok], cat: &Catalog) -> Vec<Tok> {
    let mut out = Vec::with_capacity(toks.len());
    for t in toks {
        expand_token_into(*t, cat, &mut out);
    }
    reduce_tokens(&mut out);
    out
}

/// Bubble adjacent runs about registered-disjoint curves into ascending
/// id order, re-merging (and cancelling) runs that become adjacent. This
/// is the normal form of the conjugator with respect to the registered
/// commutation relation.
pub fn sort_tokens(toks: &mut Vec<Tok>, cat: &Catalog) {
    loop {
        reduce_tokens(toks);
        let mut changed = false;
        let mut k = 0;
        while k + 1 < toks.len() {
            let (a, b) = (toks[k], toks[k + 1]);
            if a.curve != b.curve && b.curve < a.curve && cat.registered_disjoint(a.curve, b.curve)
            {
                toks.swap(k, k + 1);
                changed = true;
            }
            k += 1;
        }
        if !changed {
            return;
        }
    }
}

/// Strip conjugator tokens that provably fix the curve they act on, and
/// push registered shift words (like phi on odd chain curves) inward.
fn simplify(l: &mut Letter, cat: &Catalog) {
    loop {
        sort_tokens(&mut l.conj, cat);
        let mut changed = false;

        // Innermost run about the base curve itself fixes it.
        if let Some(last) = l.conj.last() {
            if cat.resolve_alias(last.curve) == l.base {
                l.conj.pop();
                changed = true;
            }
        }

        // A run disjoint from everything inside it (and the base) fixes
        // the curve those tokens produce.
        if !changed {
            'scan: for k in (0..l.conj.len()).rev() {
                let t = l.conj[k];
                if !cat.registered_disjoint(t.curve, l.base) {
                    continue;
                }
                for inner in &l.conj[k + 1..] {
                    if !cat.registered_disjoint(t.curve, inner.curve) {
                        continue 'scan;
                    }
                }
                l.conj.remove(k);
                changed = true;
                break;
            }
        }

        // Push a registered shift word through everything inside it.
        if !changed {
            'facts: for sf in cat.shift_facts() {
                for inverse in [false, true] {
                    let pat = if inverse {
                        sf.actor_inv_sorted.clone()
                    } else {
                        sf.actor_sorted.clone()
                    };
                    let n = pat.len();
                    if n == 0 || l.conj.len() < n {
                        continue;
                    }
                    for start in (0..=l.conj.len() - n).rev() {
                        if l.conj[start..start + n] != pat[..] {
                            continue;
                        }
                        let ok = l.conj[start + n..]
                            .iter()
                            .all(|t| sf.maps(t.curve, inverse).is_some())
                            && sf.maps(l.base, inverse).is_some();
                        if !ok {
                            continue;
                        }
                        for idx in start + n..l.conj.len() {
                            let c = l.conj[idx].curve;
                            l.conj[idx].curve = sf.maps(c, inverse).unwrap();
                        }
                        l.base = sf.maps(l.base, inverse).unwrap();
                        l.conj.drain(start..start + n);
                        changed = true;
                        break 'facts;
                    }
                }
            }
        }

        if !changed {
            return;
        }
    }
}

/// Re-compress an innermost conjugator suffix that matches the primitive
/// expansion of a derived-curve recipe, longest expansion first. The
/// boundary run may match partially (a run `c^5` absorbs a recipe run
/// `c^2` leaving `c^3`).
fn compress(l: &mut Letter, cat: &Catalog) {
    loop {
        let mut best: Option<(usize, CurveId, i64)> = None;
        for exp in cat.primitive_expansions() {
            if exp.base != l.base || exp.conj.is_empty() {
                continue;
            }
            let r = &exp.conj;
            let n = r.len();
            if l.conj.len() < n {
                continue;
            }
            let tail = &l.conj[l.conj.len() - n..];
            if tail[1..] != r[1..] {
                continue;
            }
            let (t0, r0) = (tail[0], r[0]);
            if t0.curve != r0.curve || t0.exp.signum() != r0.exp.signum() || t0.exp.abs() < r0.exp.abs()
            {
                continue;
            }
            let total: usize = r.iter().map(|t| t.exp.unsigned_abs() as usize).sum();
            match best {
                Some((bn, _, _)) if bn >= total => {}
                _ => best = Some((total, exp.id, t0.exp - r0.exp)),
            }
        }
        match best {
            Some((_, id, leftover)) => {
                let exp = cat
                    .primitive_expansions()
                    .iter()
                    .find(|e| e.id == id)
                    .unwrap();
                let n = exp.conj.len();
                l.conj.truncate(l.conj.len() - n + 1);
                let last = l.conj.len() - 1;
                if leftover == 0 {
                    l.conj.pop();
                } else {
                    l.conj[last].exp = leftover;
                }
                l.base = id;
            }
            None => return,
        }
    }
}

/// Outcome of comparing two letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LetterCmp {
    /// Identical after normalization and alias expansion.
    Equal,
    /// Different letters whose effective classes agree (up to sign); this
    /// is reported but never treated as a proof of equality.
    HomologyEqualOnly,
    Distinct,
}

pub fn letters_equal(a: &Letter, b: &Letter, cat: &Catalog) -> Result<LetterCmp> {
    let na = a.normalize(cat);
    let nb = b.normalize(cat);
    if na == nb {
        return Ok(LetterCmp::Equal);
    }
    let ca = a.effective_class(cat)?;
    let cb = b.effective_class(cat)?;
    if ca.same_unoriented(&cb) {
        Ok(LetterCmp::HomologyEqualOnly)
    } else {
        Ok(LetterCmp::Distinct)
    }
}
