//! The named-curve database for one reference surface.
//!
//! A catalog is built once per (genus, boundary count) and is immutable
//! afterwards; it owns the homology classes of every named curve, the
//! derived-curve recipes, the registered disjointness and braid relations,
//! the curve-action facts admitted as rewrite axioms, and the relators
//! available for substitution. Geometric facts are validated at the
//! homology level only; that check is necessary, not sufficient, and the
//! engine never claims more.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::homology::{pairing, HomologyClass, SpMatrix};
use crate::letter::{invert_tokens, sort_tokens, Letter, Tok};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CurveId(pub u32);

/// How disjointness from other curves is decided for a curve.
#[derive(Clone, Debug)]
pub enum Support {
    /// The curve lies in a neighbourhood of the listed chain curves; two
    /// such curves are disjoint when every pair of chain indices differs
    /// by at least 2.
    Chain(Vec<usize>),
    /// Explicit list of curves this one is known to be disjoint from.
    Explicit(Vec<CurveId>),
    /// Boundary twists: disjoint from everything on the surface.
    Central,
}

#[derive(Clone, Debug)]
pub struct CurveEntry {
    pub name: String,
    pub class: HomologyClass,
    /// Separation genus, only for separating curves named in the source
    /// geometry (stored metadata, never computed).
    pub separating_genus: Option<usize>,
    /// Conjugator recipe: this curve is (conj)(base).
    pub recipe: Option<(Vec<Tok>, CurveId)>,
    pub support: Support,
    /// Some curves are the same curve under two names.
    pub alias_of: Option<CurveId>,
    /// closed-surface name this curve projects to; None deletes the
    /// letter under projection (boundary twists).
    pub projection: Option<String>,
    pub central: bool,
}

/// A registered curve-action fact: the mapping class given by `actor`
/// (a positive word of named twists) carries `src` to `tgt`.
#[derive(Clone, Debug)]
pub struct ActionFact {
    pub id: String,
    pub actor: Vec<CurveId>,
    pub src: CurveId,
    pub tgt: CurveId,
}

/// A registered shift fact: conjugating by `actor` permutes a family of
/// named curves (phi fixes the odd chain curves; c_1...c_{2g+1} shifts the
/// chain up by one). Used by letter normalization.
#[derive(Clone, Debug)]
pub struct ShiftFact {
    pub id: String,
    pub actor_sorted: Vec<Tok>,
    pub actor_inv_sorted: Vec<Tok>,
    fwd: HashMap<CurveId, CurveId>,
    inv: HashMap<CurveId, CurveId>,
}

impl ShiftFact {
    pub fn maps(&self, c: CurveId, inverse: bool) -> Option<CurveId> {
        if inverse {
            self.inv.get(&c).copied()
        } else {
            self.fwd.get(&c).copied()
        }
    }
}

/// A rewrite rule between two positive letter sequences with the same
/// group image.
#[derive(Clone, Debug)]
pub struct Relator {
    pub id: String,
    pub lhs: Vec<Letter>,
    pub rhs: Vec<Letter>,
    /// Set for daisy relators; the substitution length delta is p - 1.
    pub daisy_type: Option<usize>,
}

/// Fully expanded recipe of a derived curve, used to re-compress letters.
#[derive(Clone, Debug)]
pub struct PrimitiveExpansion {
    pub id: CurveId,
    pub conj: Vec<Tok>,
    pub base: CurveId,
}

pub struct Catalog {
    pub genus: usize,
    pub boundary: usize,
    entries: Vec<CurveEntry>,
    by_name: HashMap<String, CurveId>,
    chain: Vec<CurveId>,
    braid: Vec<(CurveId, CurveId)>,
    relators: Vec<Relator>,
    shift_facts: Vec<ShiftFact>,
    expansions: Vec<PrimitiveExpansion>,
    /// Epsilon signs of the daisy interior classes found by the sign
    /// search, recorded for the validation report.
    pub daisy_signs: Vec<i64>,
}

impl fmt::Debug for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Catalog(g={}, n={}, {} curves)",
            self.genus,
            self.boundary,
            self.entries.len()
        )
    }
}

impl Catalog {
    // ------------------------------------------------------------------
    // lookup

    pub fn id(&self, name: &str) -> Result<CurveId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownCurve(name.to_string()))
    }

    pub fn name(&self, id: CurveId) -> &str {
        &self.entries[id.0 as usize].name
    }

    pub fn entry(&self, id: CurveId) -> &CurveEntry {
        &self.entries[id.0 as usize]
    }

    pub fn entries(&self) -> impl Iterator<Item = (CurveId, &CurveEntry)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| (CurveId(i as u32), e))
    }

    pub fn class_of(&self, id: CurveId) -> &HomologyClass {
        &self.entries[id.0 as usize].class
    }

    pub fn resolve_alias(&self, id: CurveId) -> CurveId {
        match self.entries[id.0 as usize].alias_of {
            Some(t) => self.resolve_alias(t),
            None => id,
        }
    }

    pub fn recipe_of(&self, id: CurveId) -> Option<(&[Tok], CurveId)> {
        self.entries[id.0 as usize]
            .recipe
            .as_ref()
            .map(|(c, b)| (c.as_slice(), *b))
    }

    pub fn is_central(&self, id: CurveId) -> bool {
        self.entries[self.resolve_alias(id).0 as usize].central
    }

    /// The chain curve c_i (or alpha_i on a bounded surface), 1-indexed.
    pub fn chain(&self, i: usize) -> Result<CurveId> {
        if i == 0 || i > self.chain.len() {
            return Err(Error::IndexRange(format!("chain index {i}")));
        }
        Ok(self.chain[i - 1])
    }

    pub fn chain_len(&self) -> usize {
        self.chain.len()
    }

    pub fn shift_facts(&self) -> &[ShiftFact] {
        &self.shift_facts
    }

    pub fn primitive_expansions(&self) -> &[PrimitiveExpansion] {
        &self.expansions
    }

    pub fn relator(&self, id: &str) -> Result<&Relator> {
        self.relators
            .iter()
            .find(|r| r.id == id)
            .ok_or_else(|| Error::UnknownRelator(id.to_string()))
    }

    pub fn relators(&self) -> &[Relator] {
        &self.relators
    }

    // ------------------------------------------------------------------
    // geometry queries

    /// Registered disjointness. Sound but deliberately incomplete: only
    /// what the chain pattern, stored supports, and centrality prove.
    pub fn registered_disjoint(&self, a: CurveId, b: CurveId) -> bool {
        let a = self.resolve_alias(a);
        let b = self.resolve_alias(b);
        if a == b {
            return false;
        }
        let (ea, eb) = (&self.entries[a.0 as usize], &self.entries[b.0 as usize]);
        if ea.central || eb.central {
            return true;
        }
        match (&ea.support, &eb.support) {
            (Support::Chain(s1), Support::Chain(s2)) => s1
                .iter()
                .all(|i| s2.iter().all(|j| i.abs_diff(*j) >= 2)),
            (Support::Explicit(e), Support::Chain(s)) | (Support::Chain(s), Support::Explicit(e)) => {
                s.iter().all(|i| {
                    let cid = self.chain[i - 1];
                    e.contains(&cid)
                })
            }
            (Support::Explicit(e1), Support::Explicit(e2)) => e1.contains(&b) || e2.contains(&a),
            _ => false,
        }
    }

    /// Two named curves commute as twists: equal or registered disjoint.
    pub fn commutes(&self, a: CurveId, b: CurveId) -> bool {
        self.resolve_alias(a) == self.resolve_alias(b) || self.registered_disjoint(a, b)
    }

    pub fn is_braid_pair(&self, a: CurveId, b: CurveId) -> bool {
        let a = self.resolve_alias(a);
        let b = self.resolve_alias(b);
        self.braid.contains(&(a, b)) || self.braid.contains(&(b, a))
    }

    // ------------------------------------------------------------------
    // homology action

    /// Apply the word of twists given by `tokens` to a class.
    pub fn apply_tokens(&self, tokens: &[Tok], v: &HomologyClass) -> Result<HomologyClass> {
        let mut out = v.clone();
        for t in tokens.iter().rev() {
            let c = self.class_of(t.curve);
            let p = pairing(&out, c)?;
            out = out.add(&c.scale(p * t.exp));
        }
        Ok(out)
    }

    /// Sp matrix of a token word.
    pub fn token_matrix(&self, tokens: &[Tok]) -> Result<SpMatrix> {
        let mut m = SpMatrix::identity(2 * self.genus);
        for t in tokens {
            m.mul_transvection(self.class_of(t.curve), t.exp)?;
        }
        Ok(m)
    }

    /// Sp matrix of a sequence of letters (in writing order).
    pub fn letters_matrix(&self, letters: &[Letter]) -> Result<SpMatrix> {
        let mut m = SpMatrix::identity(2 * self.genus);
        for l in letters {
            let c = l.effective_class(self)?;
            m.mul_transvection(&c, 1)?;
        }
        Ok(m)
    }

    fn relator_holds(&self, r: &Relator) -> Result<bool> {
        Ok(self.letters_matrix(&r.lhs)? == self.letters_matrix(&r.rhs)?)
    }

    // ------------------------------------------------------------------
    // action facts

    /// Build and homology-validate an action fact from its id.
    /// Grammar: rel1:m,k,i | rel2:m,k,i | rel3:l,m,i | rel4:l,m,i
    ///        | rel5:i | rel6
    pub fn action_fact(&self, id: &str) -> Result<ActionFact> {
        let g = self.genus;
        let top = 2 * g + 1;
        let (kind, args) = match id.split_once(':') {
            Some((k, a)) => (k, a),
            None => (id, ""),
        };
        let nums: Vec<usize> = if args.is_empty() {
            vec![]
        } else {
            args.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::FactInvalid(format!("bad fact id `{id}`")))
                })
                .collect::<Result<_>>()?
        };
        let chain = |i: usize| self.chain(i);
        let fact = match (kind, nums.as_slice()) {
            ("rel1", [m, k, i]) => {
                if !(1 <= *m && m <= i && *i < *k && *k <= top) {
                    return Err(Error::FactInvalid(format!("range in `{id}`")));
                }
                let actor: Vec<CurveId> =
                    (*m..=*k).rev().map(chain).collect::<Result<_>>()?;
                ActionFact {
                    id: id.into(),
                    actor,
                    src: chain(i + 1)?,
                    tgt: chain(*i)?,
                }
            }
            ("rel2", [m, k, i]) => {
                if !(1 <= *m && m <= i && *i < *k && *k <= top) {
                    return Err(Error::FactInvalid(format!("range in `{id}`")));
                }
                let actor: Vec<CurveId> = (*m..=*k).map(chain).collect::<Result<_>>()?;
                ActionFact {
                    id: id.into(),
                    actor,
                    src: chain(*i)?,
                    tgt: chain(i + 1)?,
                }
            }
            ("rel3", [l, m, i]) => {
                if !(2 * l + 1 <= top && 1 <= *m && *m <= 2 * l && 1.max(m.saturating_sub(1)) <= *i && *i <= 2 * l - 1)
                {
                    return Err(Error::FactInvalid(format!("range in `{id}`")));
                }
                let mut actor: Vec<CurveId> =
                    (1..=2 * l).rev().map(chain).collect::<Result<_>>()?;
                actor.extend((*m..=2 * l + 1).rev().map(chain).collect::<Result<Vec<_>>>()?);
                ActionFact {
                    id: id.into(),
                    actor,
                    src: chain(i + 2)?,
                    tgt: chain(*i)?,
                }
            }
            ("rel4", [l, m, i]) => {
                if !(2 * l + 1 <= top && 1 <= *m && *m <= 2 * l && 1.max(m.saturating_sub(1)) <= *i && *i <= 2 * l - 1)
                {
                    return Err(Error::FactInvalid(format!("range in `{id}`")));
                }
                let mut actor: Vec<CurveId> =
                    (*m..=2 * l + 1).map(chain).collect::<Result<_>>()?;
                actor.extend((1..=2 * l).map(chain).collect::<Result<Vec<_>>>()?);
                ActionFact {
                    id: id.into(),
                    actor,
                    src: chain(*i)?,
                    tgt: chain(i + 2)?,
                }
            }
            ("rel5", [i]) => {
                if !(1 <= *i && *i <= 2 * g) {
                    return Err(Error::FactInvalid(format!("range in `{id}`")));
                }
                let mut actor = vec![chain(top)?];
                actor.extend((1..=2 * g).rev().map(chain).collect::<Result<Vec<_>>>()?);
                actor.extend((1..=2 * g).map(chain).collect::<Result<Vec<_>>>()?);
                actor.push(chain(top)?);
                ActionFact {
                    id: id.into(),
                    actor,
                    src: chain(*i)?,
                    tgt: chain(*i)?,
                }
            }
            ("rel6", []) => {
                let mut actor: Vec<CurveId> =
                    (1..=2 * g).rev().map(chain).collect::<Result<_>>()?;
                actor.extend((1..=2 * g).map(chain).collect::<Result<Vec<_>>>()?);
                let (src, tgt) = if self.boundary > 0 {
                    (self.id("alphap")?, chain(top)?)
                } else {
                    (chain(top)?, chain(top)?)
                };
                ActionFact {
                    id: id.into(),
                    actor,
                    src,
                    tgt,
                }
            }
            _ => return Err(Error::FactInvalid(format!("unknown fact id `{id}`"))),
        };
        self.validate_fact(&fact)?;
        Ok(fact)
    }

    /// Necessary homological check of a fact: Sp(actor) sends the class of
    /// src to the class of tgt up to sign.
    pub fn validate_fact(&self, fact: &ActionFact) -> Result<()> {
        let toks: Vec<Tok> = fact.actor.iter().map(|c| Tok::new(*c, 1)).collect();
        let got = self.apply_tokens(&toks, self.class_of(fact.src))?;
        if got.same_unoriented(self.class_of(fact.tgt)) {
            Ok(())
        } else {
            Err(Error::FactInvalid(format!(
                "`{}` fails its homology check",
                fact.id
            )))
        }
    }

    // ------------------------------------------------------------------
    // construction

    /// The memoized catalog for a surface.
    pub fn for_surface(genus: usize, boundary: usize) -> Result<Arc<Catalog>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Catalog>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        {
            let map = cache.lock().unwrap();
            if let Some(c) = map.get(&(genus, boundary)) {
                return Ok(c.clone());
            }
        }
        let built = Arc::new(Self::build(genus, boundary)?);
        cache
            .lock()
            .unwrap()
            .insert((genus, boundary), built.clone());
        Ok(built)
    }

    pub fn build(genus: usize, boundary: usize) -> Result<Catalog> {
        if genus < 1 {
            return Err(Error::CatalogInvalid("genus must be >= 1".into()));
        }
        let mut cat = Catalog {
            genus,
            boundary,
            entries: vec![],
            by_name: HashMap::new(),
            chain: vec![],
            braid: vec![],
            relators: vec![],
            shift_facts: vec![],
            expansions: vec![],
            daisy_signs: vec![],
        };
        if boundary == 0 {
            cat.build_closed()?;
        } else {
            cat.build_lifted()?;
        }
        cat.build_shift_facts()?;
        cat.build_expansions();
        Ok(cat)
    }

    fn add(&mut self, e: CurveEntry) -> CurveId {
        let id = CurveId(self.entries.len() as u32);
        self.by_name.insert(e.name.clone(), id);
        self.entries.push(e);
        id
    }

    fn chain_class(i: usize, g: usize) -> HomologyClass {
        // c_{2i} -> a_i ; c_{2i-1} -> b_{i-1} + b_i with b_0 = b_{g+1} = 0.
        if i % 2 == 0 {
            HomologyClass::basis_a(i / 2, g)
        } else {
            let k = (i + 1) / 2;
            HomologyClass::basis_b(k - 1, g).add(&HomologyClass::basis_b(k, g))
        }
    }

    fn add_chain_and_derived(&mut self, prefix: &str) -> Result<()> {
        let g = self.genus;
        let top = 2 * g + 1;
        let closed = prefix == "c";
        // Lifted derived curves keep greek-flavoured names; they project
        // letterwise onto the closed-surface derived curves.
        let (d, dbar, e, ebar) = if closed {
            ("d", "dbar", "e", "ebar")
        } else {
            ("beta", "bbar", "gamma", "gbar")
        };
        let proj = |name: &str, i: usize| -> Option<String> {
            if closed {
                None
            } else {
                Some(format!("{name}{i}"))
            }
        };
        for i in 1..=top {
            let id = self.add(CurveEntry {
                name: format!("{prefix}{i}"),
                class: Self::chain_class(i, g),
                separating_genus: None,
                recipe: None,
                support: Support::Chain(vec![i]),
                alias_of: None,
                projection: proj("c", i),
                central: false,
            });
            self.chain.push(id);
        }
        for i in 1..top {
            self.braid.push((self.chain[i - 1], self.chain[i]));
        }
        // d_i = (c_{i+1})(c_i) and dbar_i = (c_{i+1}^{-1})(c_i), i = 1..2g;
        // e_{i+1} = (c_i)(c_{i+1}) and ebar_{i+1} = (c_i^{-1})(c_{i+1}).
        for i in 1..=2 * g {
            for (nm, pr, exp, conj_at, base_at, label) in [
                (d, "d", 1i64, i, i - 1, i),
                (dbar, "dbar", -1, i, i - 1, i),
                (e, "e", 1, i - 1, i, i + 1),
                (ebar, "ebar", -1, i - 1, i, i + 1),
            ] {
                let rec = (vec![Tok::new(self.chain[conj_at], exp)], self.chain[base_at]);
                let class = self.apply_tokens(&rec.0, &self.entries[rec.1 .0 as usize].class)?;
                self.add(CurveEntry {
                    name: format!("{nm}{label}"),
                    class,
                    separating_genus: None,
                    recipe: Some(rec),
                    support: Support::Chain(vec![i, i + 1]),
                    alias_of: None,
                    projection: proj(pr, label),
                    central: false,
                });
            }
        }
        // f_j = ((c_{j-1} c_{j+1})^{-1})(dbar_j) with c_0 = 1, closed only.
        if closed {
            for j in 1..=2 * g {
                let dbar_j = self.id(&format!("dbar{j}"))?;
                let mut rec = vec![Tok::new(self.chain[j], -1)];
                if j >= 2 {
                    rec.push(Tok::new(self.chain[j - 2], -1));
                }
                let base_class = self.entries[dbar_j.0 as usize].class.clone();
                let class = self.apply_tokens(&rec, &base_class)?;
                let mut supp = vec![j, j + 1];
                if j >= 2 {
                    supp.insert(0, j - 1);
                }
                self.add(CurveEntry {
                    name: format!("f{j}"),
                    class,
                    separating_genus: None,
                    recipe: Some((rec, dbar_j)),
                    support: Support::Chain(supp),
                    alias_of: None,
                    projection: None,
                    central: false,
                });
            }
        }
        Ok(())
    }

    fn build_closed(&mut self) -> Result<()> {
        let g = self.genus;
        self.add_chain_and_derived("c")?;
        if g >= 3 {
            self.build_daisies()?;
        } else if g == 2 {
            self.build_lantern()?;
        }
        // Chain relators: the even chain caps to the full relation and the
        // odd chain to the square of the top twist.
        let chain_word: Vec<Letter> = (1..=2 * g)
            .map(|i| Letter::plain(self.chain[i - 1]))
            .collect();
        let lhs: Vec<Letter> = chain_word
            .iter()
            .cloned()
            .cycle()
            .take(2 * g * (4 * g + 2))
            .collect();
        self.push_relator("chain1", lhs, vec![], None)?;
        if g >= 2 {
            let w: Vec<Letter> = (1..=2 * g - 1)
                .map(|i| Letter::plain(self.chain[i - 1]))
                .collect();
            let lhs: Vec<Letter> = w.iter().cloned().cycle().take((2 * g - 1) * 2 * g).collect();
            let top = Letter::plain(self.chain[2 * g]);
            self.push_relator("chain2", lhs, vec![top.clone(), top], None)?;
        }
        // The monodromy shift h = c_1 c_2 ... c_{2g+1} used to re-index
        // whole words; registered as a shift fact in build_shift_facts.
        Ok(())
    }

    fn build_lifted(&mut self) -> Result<()> {
        let g = self.genus;
        if g < 2 {
            return Err(Error::CatalogInvalid(
                "bounded-surface catalogs need genus >= 2".into(),
            ));
        }
        let n = self.boundary;
        self.add_chain_and_derived("alpha")?;
        let top_class = Self::chain_class(2 * g + 1, g);
        let mut alphap_dis: Vec<CurveId> = (1..=2 * g - 1).map(|i| self.chain[i - 1]).collect();
        alphap_dis.push(self.chain[2 * g]);
        self.add(CurveEntry {
            name: "alphap".into(),
            class: top_class,
            separating_genus: None,
            recipe: None,
            support: Support::Explicit(alphap_dis),
            alias_of: None,
            projection: Some(format!("c{}", 2 * g + 1)),
            central: false,
        });
        if g >= 3 {
            // chi_j projects to x_j; classes come from the same sign search.
            let (xs, _signs) = self.solve_daisy_interior()?;
            let odd_all: Vec<CurveId> = (1..=2 * g + 1)
                .filter(|i| i % 2 == 1)
                .map(|i| self.chain[i - 1])
                .collect();
            for (j, class) in xs.into_iter().enumerate() {
                self.add(CurveEntry {
                    name: format!("chi{}", j + 1),
                    class,
                    separating_genus: None,
                    recipe: None,
                    support: Support::Explicit(odd_all.clone()),
                    alias_of: None,
                    projection: Some(format!("x{}", j + 1)),
                    central: false,
                });
            }
        }
        let mut zeta_dis: Vec<CurveId> = (1..=2 * g - 1).map(|i| self.chain[i - 1]).collect();
        zeta_dis.push(self.chain[2 * g]);
        zeta_dis.push(self.id("alphap")?);
        for i in 1..=n {
            self.add(CurveEntry {
                name: format!("zeta{i}"),
                class: Self::chain_class(2 * g + 1, g),
                separating_genus: None,
                recipe: None,
                support: Support::Explicit(zeta_dis.clone()),
                alias_of: None,
                projection: Some(format!("c{}", 2 * g + 1)),
                central: false,
            });
        }
        for i in 1..=n {
            self.add(CurveEntry {
                name: format!("bdelta{i}"),
                class: HomologyClass::zero(g),
                separating_genus: None,
                recipe: None,
                support: Support::Central,
                alias_of: None,
                projection: None,
                central: true,
            });
        }
        self.add(CurveEntry {
            name: "delta".into(),
            class: HomologyClass::zero(g),
            separating_genus: None,
            recipe: None,
            support: Support::Central,
            alias_of: None,
            projection: None,
            central: true,
        });

        // Relators: the two chain relations and the boundary daisy.
        let chain_word: Vec<Letter> = (1..=2 * g)
            .map(|i| Letter::plain(self.chain[i - 1]))
            .collect();
        let lhs: Vec<Letter> = chain_word
            .iter()
            .cloned()
            .cycle()
            .take(2 * g * (4 * g + 2))
            .collect();
        let delta = Letter::plain(self.id("delta")?);
        self.push_relator("chain1", lhs, vec![delta.clone()], None)?;

        let w: Vec<Letter> = (1..=2 * g - 1)
            .map(|i| Letter::plain(self.chain[i - 1]))
            .collect();
        let lhs: Vec<Letter> = w.iter().cloned().cycle().take((2 * g - 1) * 2 * g).collect();
        let rhs = vec![
            Letter::plain(self.chain[2 * g]),
            Letter::plain(self.id("alphap")?),
        ];
        self.push_relator("chain2", lhs, rhs, None)?;

        if n >= 2 {
            // alpha_{2g+1}^{n-1} bdelta_1 ... bdelta_n alphap
            //   = zeta_1 ... zeta_n delta
            let mut lhs = vec![Letter::plain(self.chain[2 * g]); n - 1];
            for i in 1..=n {
                lhs.push(Letter::plain(self.id(&format!("bdelta{i}"))?));
            }
            lhs.push(Letter::plain(self.id("alphap")?));
            let mut rhs: Vec<Letter> = (1..=n)
                .map(|i| self.id(&format!("zeta{i}")).map(Letter::plain))
                .collect::<Result<_>>()?;
            rhs.push(delta);
            self.push_relator("bdaisy", lhs, rhs, Some(n))?;
        }
        if g >= 3 {
            // The type g-1 daisy lifted to the bounded surface.
            let mut lhs: Vec<Letter> = (1..=2 * g - 1)
                .step_by(2)
                .map(|i| Letter::plain(self.chain[i - 1]))
                .collect();
            lhs.extend(vec![Letter::plain(self.chain[2 * g]); g - 2]);
            let rhs: Vec<Letter> = (1..=g)
                .map(|j| self.id(&format!("chi{j}")).map(Letter::plain))
                .collect::<Result<_>>()?;
            self.push_relator("D", lhs, rhs, Some(g - 1))?;
        }
        Ok(())
    }

    /// Find the interior classes of the type g-1 daisy by exhaustive sign
    /// search: x_j = c_{2j-1} + eps_j c_{2g+1} with the transvection
    /// product identity as the constraint.
    fn solve_daisy_interior(&self) -> Result<(Vec<HomologyClass>, Vec<i64>)> {
        let g = self.genus;
        let u = Self::chain_class(2 * g + 1, g);
        let petals: Vec<HomologyClass> = (1..=2 * g - 1)
            .step_by(2)
            .map(|i| Self::chain_class(i, g))
            .collect();
        let mut lhs = SpMatrix::identity(2 * g);
        for p in &petals {
            lhs.mul_transvection(p, 1)?;
        }
        lhs.mul_transvection(&u, (g - 2) as i64)?;

        let mut solutions = vec![];
        for mask in 0..(1u32 << g) {
            let signs: Vec<i64> = (0..g)
                .map(|j| if mask & (1 << j) != 0 { 1 } else { -1 })
                .collect();
            let xs: Vec<HomologyClass> = (0..g)
                .map(|j| petals[j].add(&u.scale(signs[j])))
                .collect();
            let mut rhs = SpMatrix::identity(2 * g);
            for x in &xs {
                rhs.mul_transvection(x, 1)?;
            }
            if rhs == lhs {
                solutions.push((xs, signs));
            }
        }
        match solutions.len() {
            0 => Err(Error::CatalogInvalid(
                "daisy sign search found no interior classes".into(),
            )),
            1 => {
                let (xs, signs) = solutions.pop().unwrap();
                Ok((xs, signs))
            }
            m => Err(Error::CatalogInvalid(format!(
                "daisy sign search is ambiguous ({m} solutions); refusing to pick silently"
            ))),
        }
    }

    /// Interior classes of the type 2(g-1) daisy: y_1 is the separating
    /// curve (zero class), y_2..y_g are found by sign search, and
    /// y_{g+1}..y_{2g-1} are the x curves again.
    fn solve_daisy2_interior(&self, xs: &[HomologyClass]) -> Result<Vec<HomologyClass>> {
        let g = self.genus;
        let u = Self::chain_class(2 * g + 1, g);
        let mut lhs = SpMatrix::identity(2 * g);
        for i in (3..=2 * g - 1).step_by(2) {
            lhs.mul_transvection(&Self::chain_class(i, g), 2)?;
        }
        lhs.mul_transvection(&u, (2 * g - 2) as i64)?;

        let mut tail = SpMatrix::identity(2 * g);
        for x in &xs[1..] {
            tail.mul_transvection(x, 1)?;
        }

        let mut solutions = vec![];
        for mask in 0..(1u32 << (g - 1)) {
            let ys: Vec<HomologyClass> = (2..=g)
                .map(|i| {
                    let s = if mask & (1 << (i - 2)) != 0 { 1 } else { -1 };
                    Self::chain_class(2 * i - 1, g).add(&u.scale(s))
                })
                .collect();
            let mut rhs = SpMatrix::identity(2 * g);
            for y in &ys {
                rhs.mul_transvection(y, 1)?;
            }
            let rhs = rhs.mul(&tail)?;
            if rhs == lhs {
                solutions.push(ys);
            }
        }
        match solutions.len() {
            0 => Err(Error::CatalogInvalid(
                "type 2(g-1) daisy sign search found no interior classes".into(),
            )),
            1 => Ok(solutions.pop().unwrap()),
            m => Err(Error::CatalogInvalid(format!(
                "type 2(g-1) daisy sign search is ambiguous ({m} solutions)"
            ))),
        }
    }

    fn build_daisies(&mut self) -> Result<()> {
        let g = self.genus;
        let odd_all: Vec<CurveId> = (1..=2 * g + 1)
            .filter(|i| i % 2 == 1)
            .map(|i| self.chain[i - 1])
            .collect();
        let odd_high: Vec<CurveId> = (3..=2 * g + 1)
            .filter(|i| i % 2 == 1)
            .map(|i| self.chain[i - 1])
            .collect();

        let (xs, signs) = self.solve_daisy_interior()?;
        self.daisy_signs = signs;
        for (j, class) in xs.iter().enumerate() {
            self.add(CurveEntry {
                name: format!("x{}", j + 1),
                class: class.clone(),
                separating_genus: None,
                recipe: None,
                support: Support::Explicit(odd_all.clone()),
                alias_of: None,
                projection: None,
                central: false,
            });
        }
        // The primed interiors of the second type g-1 daisy. The source
        // geometry provides no class anchors for them; the sign search has
        // a unique solution for the shared left side, so they carry the
        // same classes as the unprimed curves while remaining distinct
        // letters.
        for (j, class) in xs.iter().enumerate() {
            self.add(CurveEntry {
                name: format!("xp{}", j + 1),
                class: class.clone(),
                separating_genus: None,
                recipe: None,
                support: Support::Explicit(odd_all.clone()),
                alias_of: None,
                projection: None,
                central: false,
            });
        }
        let ys = self.solve_daisy2_interior(&xs)?;
        self.add(CurveEntry {
            name: "y1".into(),
            class: HomologyClass::zero(g),
            separating_genus: Some(1),
            recipe: None,
            support: Support::Explicit(odd_high.clone()),
            alias_of: None,
            projection: None,
            central: false,
        });
        for (i, class) in ys.iter().enumerate() {
            self.add(CurveEntry {
                name: format!("y{}", i + 2),
                class: class.clone(),
                separating_genus: None,
                recipe: None,
                support: Support::Explicit(odd_high.clone()),
                alias_of: None,
                projection: None,
                central: false,
            });
        }
        for j in 2..=g {
            let target = self.id(&format!("x{j}"))?;
            self.add(CurveEntry {
                name: format!("y{}", g + j - 1),
                class: self.entries[target.0 as usize].class.clone(),
                separating_genus: None,
                recipe: None,
                support: Support::Explicit(odd_all.clone()),
                alias_of: Some(target),
                projection: None,
                central: false,
            });
        }

        // D_{g-1}: c_1 c_3 ... c_{2g-1} c_{2g+1}^{g-2} = x_1 ... x_g
        let mut lhs: Vec<Letter> = (1..=2 * g - 1)
            .step_by(2)
            .map(|i| Letter::plain(self.chain[i - 1]))
            .collect();
        lhs.extend(vec![Letter::plain(self.chain[2 * g]); g - 2]);
        let rhs: Vec<Letter> = (1..=g)
            .map(|j| self.id(&format!("x{j}")).map(Letter::plain))
            .collect::<Result<_>>()?;
        self.push_relator("D", lhs.clone(), rhs, Some(g - 1))?;
        let rhs: Vec<Letter> = (1..=g)
            .map(|j| self.id(&format!("xp{j}")).map(Letter::plain))
            .collect::<Result<_>>()?;
        self.push_relator("Dprime", lhs, rhs, Some(g - 1))?;

        // D_{2(g-1)}: c_3^2 c_5^2 ... c_{2g-1}^2 c_{2g+1}^{2g-2}
        //   = y_1 y_2 ... y_{2g-1}
        let mut lhs: Vec<Letter> = Vec::new();
        for i in (3..=2 * g - 1).step_by(2) {
            lhs.push(Letter::plain(self.chain[i - 1]));
            lhs.push(Letter::plain(self.chain[i - 1]));
        }
        lhs.extend(vec![Letter::plain(self.chain[2 * g]); 2 * g - 2]);
        let rhs: Vec<Letter> = (1..=2 * g - 1)
            .map(|i| self.id(&format!("y{i}")).map(Letter::plain))
            .collect::<Result<_>>()?;
        self.push_relator("D2", lhs, rhs, Some(2 * (g - 1)))?;
        Ok(())
    }

    /// The genus-2 lantern: the complement of c_1 and c_5 in the surface
    /// is a 4-holed sphere, so t_{c1}^2 t_{c5}^2 = t_{y1} t_{x1} t_{x2}
    /// with y_1 the separating interior curve.
    fn build_lantern(&mut self) -> Result<()> {
        let g = self.genus;
        debug_assert_eq!(g, 2);
        let c1 = self.chain[0];
        let c5 = self.chain[4];
        let dis = vec![c1, c5];
        let cls1 = Self::chain_class(1, g).add(&Self::chain_class(5, g));
        let cls2 = Self::chain_class(1, g).sub(&Self::chain_class(5, g));
        self.add(CurveEntry {
            name: "y1".into(),
            class: HomologyClass::zero(g),
            separating_genus: Some(1),
            recipe: None,
            support: Support::Explicit(dis.clone()),
            alias_of: None,
            projection: None,
            central: false,
        });
        self.add(CurveEntry {
            name: "x1".into(),
            class: cls1,
            separating_genus: None,
            recipe: None,
            support: Support::Explicit(dis.clone()),
            alias_of: None,
            projection: None,
            central: false,
        });
        self.add(CurveEntry {
            name: "x2".into(),
            class: cls2,
            separating_genus: None,
            recipe: None,
            support: Support::Explicit(dis),
            alias_of: None,
            projection: None,
            central: false,
        });
        let lhs = vec![
            Letter::plain(c1),
            Letter::plain(c1),
            Letter::plain(c5),
            Letter::plain(c5),
        ];
        let rhs = vec![
            Letter::plain(self.id("y1")?),
            Letter::plain(self.id("x1")?),
            Letter::plain(self.id("x2")?),
        ];
        self.push_relator("lantern", lhs, rhs, Some(2))?;
        Ok(())
    }

    fn push_relator(
        &mut self,
        id: &str,
        lhs: Vec<Letter>,
        rhs: Vec<Letter>,
        daisy_type: Option<usize>,
    ) -> Result<()> {
        let r = Relator {
            id: id.to_string(),
            lhs,
            rhs,
            daisy_type,
        };
        if !self.relator_holds(&r)? {
            return Err(Error::CatalogInvalid(format!(
                "relator `{id}` fails its homology identity"
            )));
        }
        if let Some(p) = r.daisy_type {
            if r.lhs.len() != 2 * p || r.rhs.len() != p + 1 {
                return Err(Error::CatalogInvalid(format!(
                    "daisy relator `{id}` has wrong side lengths for type {p}"
                )));
            }
        }
        self.relators.push(r);
        Ok(())
    }

    /// phi = c_{2g+1}^{g+1} c_{2g-1}^g ... c_3^2 c_1 as a token word.
    pub fn phi_tokens(&self) -> Vec<Tok> {
        let g = self.genus;
        let mut toks = vec![];
        for j in (1..=g + 1).rev() {
            toks.push(Tok::new(self.chain[2 * j - 2], j as i64));
        }
        toks
    }

    fn build_shift_facts(&mut self) -> Result<()> {
        let g = self.genus;
        // phi fixes every odd chain curve (and alphap on bounded surfaces).
        let mut fwd = HashMap::new();
        for i in (1..=2 * g + 1).step_by(2) {
            fwd.insert(self.chain[i - 1], self.chain[i - 1]);
        }
        if self.boundary > 0 {
            let ap = self.id("alphap")?;
            fwd.insert(ap, ap);
        }
        let actor = self.phi_tokens();
        let fact = self.make_shift("phi", actor, fwd.clone(), fwd)?;
        self.shift_facts.push(fact);

        if self.boundary == 0 {
            // h = c_1 c_2 ... c_{2g+1} shifts c_i to c_{i+1}, i <= 2g.
            let mut fwd = HashMap::new();
            let mut inv = HashMap::new();
            for i in 1..=2 * g {
                fwd.insert(self.chain[i - 1], self.chain[i]);
                inv.insert(self.chain[i], self.chain[i - 1]);
            }
            let actor: Vec<Tok> = (1..=2 * g + 1)
                .map(|i| Tok::new(self.chain[i - 1], 1))
                .collect();
            let fact = self.make_shift("h", actor, fwd, inv)?;
            self.shift_facts.push(fact);
        }
        Ok(())
    }

    fn make_shift(
        &self,
        id: &str,
        actor: Vec<Tok>,
        fwd: HashMap<CurveId, CurveId>,
        inv: HashMap<CurveId, CurveId>,
    ) -> Result<ShiftFact> {
        // Homology validation of the claimed action.
        for (&src, &tgt) in &fwd {
            let got = self.apply_tokens(&actor, self.class_of(src))?;
            if !got.same_unoriented(self.class_of(tgt)) {
                return Err(Error::CatalogInvalid(format!(
                    "shift fact `{id}` fails its homology check on {}",
                    self.name(src)
                )));
            }
        }
        let mut actor_sorted = actor.clone();
        sort_tokens(&mut actor_sorted, self);
        let mut actor_inv_sorted = invert_tokens(&actor);
        sort_tokens(&mut actor_inv_sorted, self);
        Ok(ShiftFact {
            id: id.to_string(),
            actor_sorted,
            actor_inv_sorted,
            fwd,
            inv,
        })
    }

    fn build_expansions(&mut self) {
        let ids: Vec<CurveId> = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.recipe.is_some())
            .map(|(i, _)| CurveId(i as u32))
            .collect();
        let mut exps = vec![];
        for id in ids {
            let expanded = Letter::plain(id).expand(self);
            let mut conj = expanded.conj;
            sort_tokens(&mut conj, self);
            exps.push(PrimitiveExpansion {
                id,
                conj,
                base: expanded.base,
            });
        }
        self.expansions = exps;
    }
}
