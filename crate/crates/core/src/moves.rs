//! The rewriting moves on factorizations.
//!
//! Every move either preserves the homology image exactly (Hurwitz moves,
//! commutation, braid rewrites, action facts, substitutions) or conjugates
//! it (cyclic permutation, simultaneous conjugation). Hurwitz moves are
//! exact by construction; the other moves check their registered
//! preconditions, which imply preservation.

use crate::catalog::{ActionFact, Catalog, Relator};
use crate::error::{Error, Result};
use crate::homology::pairing;
use crate::letter::{invert_tokens, Letter, LetterCmp, letters_equal};
use crate::word::Factorization;

fn check_index(w: &Factorization, i: usize, need: usize) -> Result<()> {
    if i == 0 || i + need - 1 > w.len() {
        return Err(Error::MoveIndex {
            index: i,
            len: w.len(),
        });
    }
    Ok(())
}

/// (..., t_i, t_{i+1}, ...) -> (..., t_i t_{i+1} t_i^{-1}, t_i, ...).
/// 1-based index of the left letter of the pair.
pub fn hurwitz_right(w: &Factorization, i: usize, cat: &Catalog) -> Result<Factorization> {
    check_index(w, i, 2)?;
    let mut out = w.clone();
    let a = out.letters[i - 1].clone();
    let b = out.letters[i].clone();
    let mut conj = a.as_tokens();
    conj.extend(b.conj.iter().copied());
    let moved = Letter::conjugated(conj, b.base).normalize(cat);
    out.letters[i - 1] = moved;
    out.letters[i] = a;
    Ok(out)
}

/// (..., t_i, t_{i+1}, ...) -> (..., t_{i+1}, t_{i+1}^{-1} t_i t_{i+1}, ...).
pub fn hurwitz_left(w: &Factorization, i: usize, cat: &Catalog) -> Result<Factorization> {
    check_index(w, i, 2)?;
    let mut out = w.clone();
    let a = out.letters[i - 1].clone();
    let b = out.letters[i].clone();
    let mut conj = b.as_tokens_inv();
    conj.extend(a.conj.iter().copied());
    let moved = Letter::conjugated(conj, a.base).normalize(cat);
    out.letters[i - 1] = b;
    out.letters[i] = moved;
    Ok(out)
}

/// Rotate the first k letters to the end.
pub fn cyclic_permute(w: &Factorization, k: usize) -> Factorization {
    let mut out = w.clone();
    if out.is_empty() {
        return out;
    }
    let k = k % out.len();
    out.letters.rotate_left(k);
    out
}

/// Conjugate every letter by the token word u.
pub fn global_conjugate(
    w: &Factorization,
    u: &[crate::letter::Tok],
    cat: &Catalog,
) -> Factorization {
    let mut out = w.clone();
    for l in out.letters.iter_mut() {
        let mut conj = u.to_vec();
        conj.extend(l.conj.iter().copied());
        *l = Letter::conjugated(conj, l.base).normalize(cat);
    }
    out
}

/// Decide whether two letters provably commute: equal letters, or curves
/// whose disjointness follows from the catalog after stripping a common
/// conjugator prefix.
pub fn provably_commute(a: &Letter, b: &Letter, cat: &Catalog) -> Result<bool> {
    if letters_equal(a, b, cat)? == LetterCmp::Equal {
        return Ok(true);
    }
    let na = a.normalize(cat);
    let nb = b.normalize(cat);
    let common = na
        .conj
        .iter()
        .zip(&nb.conj)
        .take_while(|(x, y)| x == y)
        .count();
    let ta = &na.conj[common..];
    let tb = &nb.conj[common..];
    // Support of each side: conjugator curves plus the base.
    let sa: Vec<_> = ta
        .iter()
        .map(|t| t.curve)
        .chain([na.base])
        .collect();
    let sb: Vec<_> = tb
        .iter()
        .map(|t| t.curve)
        .chain([nb.base])
        .collect();
    Ok(sa
        .iter()
        .all(|x| sb.iter().all(|y| cat.registered_disjoint(*x, *y))))
}

/// Swap letters i, i+1; requires them to provably commute.
pub fn commute_adjacent(w: &Factorization, i: usize, cat: &Catalog) -> Result<Factorization> {
    check_index(w, i, 2)?;
    let a = &w.letters[i - 1];
    let b = &w.letters[i];
    if !provably_commute(a, b, cat)? {
        return Err(Error::NotDisjoint { i, j: i + 1 });
    }
    debug_assert_eq!(
        pairing(&a.effective_class(cat)?, &b.effective_class(cat)?)?,
        0
    );
    let mut out = w.clone();
    out.letters.swap(i - 1, i);
    Ok(out)
}

/// t_a t_b t_a -> t_b t_a t_b at positions i..i+2, for a registered braid
/// pair, all three letters under one common conjugator.
pub fn braid_rewrite(w: &Factorization, i: usize, cat: &Catalog) -> Result<Factorization> {
    check_index(w, i, 3)?;
    let x = w.letters[i - 1].normalize(cat);
    let y = w.letters[i].normalize(cat);
    let z = w.letters[i + 1].normalize(cat);
    if x != z || x.conj != y.conj || !cat.is_braid_pair(x.base, y.base) {
        return Err(Error::BraidPattern(i));
    }
    let mut out = w.clone();
    out.letters[i - 1] = y.clone();
    out.letters[i] = x.clone();
    out.letters[i + 1] = y;
    Ok(out)
}

/// Apply a registered action fact at position i.
///
/// Forward:  actor-letters . t_src  ->  t_tgt . actor-letters
/// Reverse:  t_tgt . actor-letters  ->  actor-letters . t_src
pub fn apply_action_fact(
    w: &Factorization,
    fact: &ActionFact,
    i: usize,
    cat: &Catalog,
) -> Result<Factorization> {
    let n = fact.actor.len();
    check_index(w, i, n + 1)?;
    let window: Vec<Letter> = w.letters[i - 1..i - 1 + n + 1]
        .iter()
        .map(|l| l.normalize(cat))
        .collect();
    let actor: Vec<Letter> = fact
        .actor
        .iter()
        .map(|c| Letter::plain(*c).normalize(cat))
        .collect();
    let src = Letter::plain(fact.src).normalize(cat);
    let tgt = Letter::plain(fact.tgt).normalize(cat);

    let mut out = w.clone();
    if window[..n] == actor[..] && window[n] == src {
        let mut repl = vec![tgt];
        repl.extend(actor);
        out.letters.splice(i - 1..i - 1 + n + 1, repl);
        Ok(out)
    } else if window[0] == tgt && window[1..] == actor[..] {
        let mut repl = actor;
        repl.push(src);
        out.letters.splice(i - 1..i - 1 + n + 1, repl);
        Ok(out)
    } else {
        Err(Error::FactMismatch {
            id: fact.id.clone(),
            at: i,
        })
    }
}

/// Replace one side of a relator by the other at position i. The side to
/// replace is matched literally after letter normalization; the left side
/// is tried first.
pub fn substitute(
    w: &Factorization,
    relator: &Relator,
    i: usize,
    cat: &Catalog,
) -> Result<(Factorization, SubstApplied)> {
    let try_side = |from: &[Letter], to: &[Letter]| -> Option<Factorization> {
        let n = from.len();
        if n == 0 || i == 0 || i + n - 1 > w.len() {
            return None;
        }
        let window: Vec<Letter> = w.letters[i - 1..i - 1 + n]
            .iter()
            .map(|l| l.normalize(cat))
            .collect();
        let from_n: Vec<Letter> = from.iter().map(|l| l.normalize(cat)).collect();
        if window == from_n {
            let mut out = w.clone();
            out.letters
                .splice(i - 1..i - 1 + n, to.iter().map(|l| l.normalize(cat)));
            Some(out)
        } else {
            None
        }
    };
    if let Some(out) = try_side(&relator.lhs, &relator.rhs) {
        return Ok((
            out,
            SubstApplied {
                relator: relator.id.clone(),
                daisy_type: relator.daisy_type,
                forward: true,
            },
        ));
    }
    if let Some(out) = try_side(&relator.rhs, &relator.lhs) {
        return Ok((
            out,
            SubstApplied {
                relator: relator.id.clone(),
                daisy_type: relator.daisy_type,
                forward: false,
            },
        ));
    }
    Err(Error::SubstMismatch {
        id: relator.id.clone(),
        at: i,
    })
}

/// What a substitution did, for trace bookkeeping.
#[derive(Clone, Debug)]
pub struct SubstApplied {
    pub relator: String,
    pub daisy_type: Option<usize>,
    /// true when the stored left side was replaced by the right side.
    pub forward: bool,
}

/// Conjugating prefix for a cyclic rotation by k: the homology image of
/// the rotated word is P^{-1} (image) P with P the prefix image.
pub fn rotation_conjugator(
    w: &Factorization,
    k: usize,
    cat: &Catalog,
) -> Result<crate::homology::SpMatrix> {
    let k = if w.is_empty() { 0 } else { k % w.len() };
    cat.letters_matrix(&w.letters[..k])
}

pub use crate::letter::letters_equal as compare_letters;

/// Inverse tokens helper re-exported for script use.
pub fn conjugator_inverse(u: &[crate::letter::Tok]) -> Vec<crate::letter::Tok> {
    invert_tokens(u)
}
