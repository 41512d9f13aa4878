//! Block-coding feedback over nondeterministic channels.
//!
//! Once per block of `τ` steps the coder measures the state, snaps it to
//! the nearest grid element, looks up a spanning word for it and sends the
//! word's index as a codeword of `τ` channel symbols (one per step). The
//! channel may deliver any output its relation allows; an adversary picks
//! which. The whole block reaches the decoder at the block boundary, and
//! the decoded word drives the plant for the next `τ` steps. With several
//! links (one per component of a product system) each component's index
//! travels over its own channel.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{build_codebook, Channel, Codebook};
use crate::region::GridElements;
use crate::span::{FrontierPoint, SpanningSolution};
use crate::span::stay::stay_set_masked;
use crate::{BitSet, ControlWord, Error, GridRegion, Result, SystemDef};

/// Received blocks enumerated per link by the greedy-escape adversary.
const GREEDY_CANDIDATES: u128 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub channel: Channel,
    pub codebook: Codebook,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockCodingStrategy {
    pub tau: usize,
    /// Word set per link. A single link carries whole-system words; with
    /// one link per component the joint word is assembled from the parts.
    pub families: Vec<Vec<ControlWord>>,
    /// For each grid element, the word index sent on each link.
    pub selector: Vec<Vec<u32>>,
    pub links: Vec<Link>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyOptions {
    /// Cap on codebook sizes, to exercise the under-capacity case.
    pub codebook_limit: Option<usize>,
}

fn link_for(channel: &Channel, tau: usize, required: usize, opts: &StrategyOptions) -> Result<Link> {
    let insufficient = |available| Error::CapacityInsufficient { required, available, block_len: tau };
    if required == 1 {
        // no information to send: any fixed block will do
        return Ok(Link { channel: channel.clone(), codebook: Codebook { block_len: tau, words: vec![vec![0; tau]] } });
    }
    if let Some(limit) = opts.codebook_limit {
        if limit < required {
            return Err(insufficient(limit));
        }
    }
    match build_codebook(channel, tau, required) {
        Ok(codebook) => Ok(Link { channel: channel.clone(), codebook }),
        Err(Error::CodebookTooLarge { available, .. }) => Err(insufficient(available)),
        Err(e) => Err(e),
    }
}

fn check_snapping(region: &GridRegion) -> Result<()> {
    let need = region.half_cell_diagonal(0..region.dim());
    if region.margin() < need {
        return Err(Error::Config(format!(
            "margin {} is below the snapping error {need}; grid certificates do not cover measured states",
            region.margin()
        )));
    }
    Ok(())
}

/// Strategy sending the index of a spanning word over one channel.
pub fn build_strategy(
    solution: &SpanningSolution,
    channel: &Channel,
    region: &GridRegion,
    opts: &StrategyOptions,
) -> Result<BlockCodingStrategy> {
    if solution.component.is_some() {
        return Err(Error::Config("a subsystem solution does not determine whole-system words".into()));
    }
    check_snapping(region)?;
    let link = link_for(channel, solution.tau, solution.cardinality, opts)?;
    Ok(BlockCodingStrategy {
        tau: solution.tau,
        families: vec![solution.words.clone()],
        selector: solution.selector.iter().map(|&s| vec![s]).collect(),
        links: vec![link],
    })
}

/// Per-component strategy from a product spanning family.
pub fn build_network_strategy(
    system: &SystemDef,
    region: &GridRegion,
    point: &FrontierPoint,
    channels: &[Channel],
    opts: &StrategyOptions,
) -> Result<BlockCodingStrategy> {
    let n = system.component_count();
    if point.witness.len() != n || channels.len() != n {
        return Err(Error::Dimension { expected: n, got: point.witness.len().min(channels.len()) });
    }
    check_snapping(region)?;
    let tau = point.tau();
    let links: Vec<Link> =
        channels.iter().zip(&point.witness).map(|(c, s)| link_for(c, tau, s.len(), opts)).collect::<Result<_>>()?;
    let elements = region.discretize()?;
    let selector = joint_selector(system, region, &elements, &point.witness)?;
    Ok(BlockCodingStrategy { tau, families: point.witness.clone(), selector, links })
}

/// First combination (lexicographic) covering each element.
fn joint_selector(
    system: &SystemDef,
    region: &GridRegion,
    elements: &GridElements,
    family: &[Vec<ControlWord>],
) -> Result<Vec<Vec<u32>>> {
    let mut sel: Vec<Option<Vec<u32>>> = vec![None; elements.len()];
    let mut open = BitSet::full(elements.len());
    let mut idx = vec![0usize; family.len()];
    if family.iter().any(Vec::is_empty) {
        return Err(Error::Config("empty word set in a family".into()));
    }
    'combos: loop {
        let parts: Vec<ControlWord> = idx.iter().zip(family).map(|(&k, s)| s[k].clone()).collect();
        let joint = ControlWord::from_components(system, &parts)?;
        for e in stay_set_masked(system, region, elements, &joint, &open).iter() {
            sel[e] = Some(idx.iter().map(|&k| k as u32).collect());
            open.remove(e);
        }
        if open.is_empty() {
            break;
        }
        let mut k = family.len();
        loop {
            if k == 0 {
                break 'combos;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < family[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
    if let Some(e) = open.first() {
        return Err(Error::Verification(format!(
            "family does not span: {} grid points uncovered, first at {:?}",
            open.count(),
            elements.point(e)
        )));
    }
    Ok(sel.into_iter().map(Option::unwrap).collect())
}

/// A strategy that ignores measurements and repeats one word per link,
/// which is all a zero-capacity channel allows.
pub fn fixed_word_strategy(words: Vec<ControlWord>, channels: &[Channel], n_elements: usize) -> Result<BlockCodingStrategy> {
    let tau = words.first().map(ControlWord::len).ok_or_else(|| Error::Config("no words".into()))?;
    if channels.len() != words.len() {
        return Err(Error::Dimension { expected: words.len(), got: channels.len() });
    }
    let links = channels.iter().map(|c| link_for(c, tau, 1, &StrategyOptions::default())).collect::<Result<_>>()?;
    Ok(BlockCodingStrategy {
        tau,
        families: words.into_iter().map(|w| vec![w]).collect(),
        selector: vec![vec![0; channels.len()]; n_elements],
        links,
    })
}

/// How channel outputs are chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adversary {
    /// A fixed deterministic resolution: `map[s]` is the output for `s`.
    Fixed(Vec<usize>),
    /// Uniform choice among allowed outputs, seeded.
    SeededRandom(u64),
    /// Per block, the received sequence whose decoded word leaves the
    /// strict interior soonest, then ends farthest from the grid centroid.
    GreedyEscape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub start: usize,
    pub element: usize,
    pub sent_index: Vec<u32>,
    pub sent: Vec<Vec<usize>>,
    pub received: Vec<Vec<usize>>,
    pub decoded: Vec<Option<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub states: Vec<Vec<f64>>,
    pub blocks: Vec<BlockRecord>,
    pub ok: bool,
    pub first_escape: Option<usize>,
    /// Blocks in which some link decoded a different index than was sent.
    pub decode_errors: usize,
    /// Distinct word indices actually sent, per link.
    pub words_used: Vec<usize>,
    /// `(1/τ) log₂` of the codebook size, per link.
    pub codebook_rate: Vec<f64>,
    /// `(1/τ) log₂` of the number of distinct words sent, per link.
    pub used_rate: Vec<f64>,
}

struct Resolver {
    adversary: Adversary,
    rng: ChaCha8Rng,
}

impl BlockCodingStrategy {
    fn joint_word(&self, system: &SystemDef, idx: &[u32]) -> Result<ControlWord> {
        if self.families.len() == 1 {
            return Ok(self.families[0][idx[0] as usize].clone());
        }
        let parts: Vec<ControlWord> = idx.iter().zip(&self.families).map(|(&k, s)| s[k as usize].clone()).collect();
        ControlWord::from_components(system, &parts)
    }

    pub fn word_counts(&self) -> Vec<usize> {
        self.families.iter().map(Vec::len).collect()
    }
}

/// Steps the block survives in the strict interior and the final squared
/// distance from `center`.
fn block_score(system: &SystemDef, region: &GridRegion, x: &[f64], word: &ControlWord, center: &[f64]) -> (usize, f64) {
    let mut cur = x.to_vec();
    let mut next = vec![0.0; x.len()];
    for (k, &u) in word.entries.iter().enumerate() {
        system.step_into(&cur, u as usize, &mut next);
        if !region.in_strict_interior(&next) {
            return (k, f64::INFINITY);
        }
        core::mem::swap(&mut cur, &mut next);
    }
    let d = cur.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
    (word.len(), d)
}

fn centroid(elements: &GridElements) -> Vec<f64> {
    let mut c = vec![0.0; elements.dim()];
    for p in elements.points() {
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += pi;
        }
    }
    c.iter_mut().for_each(|v| *v /= elements.len() as f64);
    c
}

/// Run the loop for `horizon` steps (rounded up to whole blocks) from `x0`,
/// stopping at the first state outside the strict interior.
pub fn simulate(
    system: &SystemDef,
    region: &GridRegion,
    elements: &GridElements,
    strategy: &BlockCodingStrategy,
    adversaries: &[Adversary],
    horizon: usize,
    x0: &[f64],
) -> Result<Transcript> {
    let nl = strategy.links.len();
    if adversaries.len() != nl {
        return Err(Error::Dimension { expected: nl, got: adversaries.len() });
    }
    if x0.len() != system.state_dim() || !region.contains(x0) {
        return Err(Error::Config(format!("initial state {x0:?} is not in the region")));
    }
    if strategy.selector.len() != elements.len() {
        return Err(Error::Dimension { expected: elements.len(), got: strategy.selector.len() });
    }
    for (l, a) in adversaries.iter().enumerate() {
        if let Adversary::Fixed(map) = a {
            let ch = &strategy.links[l].channel;
            if map.len() != ch.alphabet_size() || map.iter().enumerate().any(|(s, &o)| o >= ch.alphabet_size() || !ch.outputs(s).contains(o)) {
                return Err(Error::Config(format!("link {l}: resolution map is not allowed by the channel")));
            }
        }
    }
    let mut resolvers: Vec<Resolver> = adversaries
        .iter()
        .enumerate()
        .map(|(l, a)| {
            let seed = if let Adversary::SeededRandom(s) = a { *s } else { 0 };
            Resolver { adversary: a.clone(), rng: ChaCha8Rng::seed_from_u64(seed ^ ((l as u64) << 32)) }
        })
        .collect();
    let center = centroid(elements);
    let tau = strategy.tau;
    let blocks = horizon.div_ceil(tau).max(1);
    let mut used: Vec<BitSet> = strategy.families.iter().map(|f| BitSet::new(f.len())).collect();
    let mut t = Transcript {
        states: vec![x0.to_vec()],
        blocks: Vec::with_capacity(blocks),
        ok: true,
        first_escape: None,
        decode_errors: 0,
        words_used: Vec::new(),
        codebook_rate: strategy.links.iter().map(|l| libm::log2(l.codebook.len() as f64) / tau as f64).collect(),
        used_rate: Vec::new(),
    };
    let mut x = x0.to_vec();
    let mut next = vec![0.0; x.len()];
    'blocks: for b in 0..blocks {
        let element = region.nearest_element(elements, &x);
        let sent_index = strategy.selector[element].clone();
        for (u, &i) in used.iter_mut().zip(&sent_index) {
            u.insert(i as usize);
        }
        let sent: Vec<Vec<usize>> =
            sent_index.iter().zip(&strategy.links).map(|(&i, l)| l.codebook.words[i as usize].clone()).collect();
        let mut decoded: Vec<Option<u32>> = sent_index.iter().map(|&i| Some(i)).collect();
        let mut received = Vec::with_capacity(nl);
        for l in 0..nl {
            let link = &strategy.links[l];
            let rx = match &resolvers[l].adversary {
                Adversary::Fixed(map) => sent[l].iter().map(|&s| map[s]).collect(),
                Adversary::SeededRandom(_) => sent[l]
                    .iter()
                    .map(|&s| {
                        let outs: Vec<usize> = link.channel.outputs(s).iter().collect();
                        outs[resolvers[l].rng.random_range(0..outs.len())]
                    })
                    .collect(),
                Adversary::GreedyEscape => greedy_block(system, region, strategy, &x, &center, l, &sent[l], &decoded)?,
            };
            decoded[l] = link.codebook.decode(&link.channel, &rx).map(|i| i as u32);
            received.push(rx);
        }
        if decoded.iter().zip(&sent_index).any(|(d, &s)| *d != Some(s)) {
            t.decode_errors += 1;
        }
        // an undecodable block falls back to word 0
        let applied: Vec<u32> = decoded.iter().map(|d| d.unwrap_or(0)).collect();
        let word = strategy.joint_word(system, &applied)?;
        t.blocks.push(BlockRecord { start: b * tau, element, sent_index, sent, received, decoded });
        for (k, &u) in word.entries.iter().enumerate() {
            system.step_into(&x, u as usize, &mut next);
            core::mem::swap(&mut x, &mut next);
            t.states.push(x.clone());
            if !region.in_strict_interior(&x) {
                t.ok = false;
                t.first_escape = Some(b * tau + k + 1);
                break 'blocks;
            }
        }
    }
    t.words_used = used.iter().map(BitSet::count).collect();
    t.used_rate = t.words_used.iter().map(|&c| libm::log2(c as f64) / tau as f64).collect();
    Ok(t)
}

#[allow(clippy::too_many_arguments)]
fn greedy_block(
    system: &SystemDef,
    region: &GridRegion,
    strategy: &BlockCodingStrategy,
    x: &[f64],
    center: &[f64],
    link: usize,
    sent: &[usize],
    decoded: &[Option<u32>],
) -> Result<Vec<usize>> {
    let ch = &strategy.links[link].channel;
    let options: Vec<Vec<usize>> = sent.iter().map(|&s| ch.outputs(s).iter().collect()).collect();
    let count: u128 = options.iter().map(|o| o.len() as u128).product();
    if count > GREEDY_CANDIDATES {
        return Ok(options.iter().map(|o| *o.last().unwrap()).collect());
    }
    let mut best: Option<((usize, f64), Vec<usize>)> = None;
    let mut pick = vec![0usize; options.len()];
    loop {
        let rx: Vec<usize> = pick.iter().zip(&options).map(|(&k, o)| o[k]).collect();
        let mut idx: Vec<u32> = decoded.iter().map(|d| d.unwrap_or(0)).collect();
        idx[link] = strategy.links[link].codebook.decode(ch, &rx).map_or(0, |i| i as u32);
        let word = strategy.joint_word(system, &idx)?;
        let (steps, dist) = block_score(system, region, x, &word, center);
        let key = (steps, -dist);
        if best.as_ref().is_none_or(|(k, _)| key.0 < k.0 || (key.0 == k.0 && key.1 < k.1)) {
            best = Some((key, rx));
        }
        let mut k = pick.len();
        loop {
            if k == 0 {
                return Ok(best.unwrap().1);
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < options[k].len() {
                break;
            }
            pick[k] = 0;
        }
    }
}
