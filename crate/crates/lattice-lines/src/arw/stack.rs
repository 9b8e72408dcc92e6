//! Per-site instruction stacks and their jump/sleep factorization.
//!
//! A stack holds, for every site, a lazily sampled infinite sequence of
//! instructions F_{x,j}, j = 1, 2, …. The dynamics only ever burn the next
//! unburned instruction of a site, but stabilization-order experiments
//! re-run the *same* realization under different schedules, so all stacks
//! are memoized and addressable by `(site, index)`.
//!
//! Each stack factorizes into the subsequence of jump instructions
//! (`jump(x, k)`, the k-th jump at x) and the sleep counts between them
//! (`sleep_gap(x, k)`, the number of sleeps strictly between jump k-1 and
//! jump k). The factorization is derived from the composite sequence, never
//! sampled separately, so it round-trips exactly.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::rng::SeededStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Instruction {
    JumpLeft,
    JumpRight,
    Sleep,
}

use serde::{Deserialize, Serialize};

impl Instruction {
    /// Displacement carried by the instruction: -1, +1 or 0.
    pub fn displacement(self) -> i64 {
        match self {
            Instruction::JumpLeft => -1,
            Instruction::JumpRight => 1,
            Instruction::Sleep => 0,
        }
    }

    pub fn is_jump(self) -> bool {
        !matches!(self, Instruction::Sleep)
    }
}

/// Read access to a realization of the instruction stacks.
///
/// `instruction(x, j)` is 1-indexed in j. Implementations must be
/// deterministic: repeated queries return the same value.
pub trait Stacks {
    fn instruction(&self, site: i64, j: u64) -> Instruction;
}

/// Jump/sleep probabilities of the composite stack law.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ArwParams {
    /// Sleep rate λ > 0.
    pub lambda: f64,
    /// Probability of a right jump given a jump; q = 1 - p.
    pub p: f64,
}

impl ArwParams {
    pub fn new(lambda: f64, p: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::parameter(format!("lambda must be positive, got {lambda}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::parameter(format!("p must lie in [0,1], got {p}")));
        }
        Ok(ArwParams { lambda, p })
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// P(instruction = Sleep) = λ/(1+λ).
    pub fn sleep_probability(&self) -> f64 {
        self.lambda / (1.0 + self.lambda)
    }

    fn sample(&self, stream: &mut SeededStream) -> Instruction {
        // Thresholds q/(1+λ) and (q+p)/(1+λ) = 1/(1+λ).
        let u = stream.uniform_open01();
        let denom = 1.0 + self.lambda;
        if u <= self.q() / denom {
            Instruction::JumpLeft
        } else if u <= 1.0 / denom {
            Instruction::JumpRight
        } else {
            Instruction::Sleep
        }
    }
}

struct SiteStack {
    items: Vec<Instruction>,
    stream: SeededStream,
}

/// Lazily sampled stacks: site x draws from the substream derived from
/// `(base, "stack", x)`, so any site can be replayed in isolation.
pub struct SampledStacks {
    params: ArwParams,
    base: SeededStream,
    sites: RefCell<HashMap<i64, SiteStack>>,
}

impl SampledStacks {
    pub fn new(params: ArwParams, base: SeededStream) -> Self {
        SampledStacks {
            params,
            base,
            sites: RefCell::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> ArwParams {
        self.params
    }
}

const STACK_TAG: u64 = 0x5741_434b; // "WACK"

impl Stacks for SampledStacks {
    fn instruction(&self, site: i64, j: u64) -> Instruction {
        assert!(j >= 1, "instruction index is 1-based");
        let mut sites = self.sites.borrow_mut();
        let entry = sites.entry(site).or_insert_with(|| SiteStack {
            items: Vec::new(),
            stream: self.base.derive(&[STACK_TAG, site as u64]),
        });
        while (entry.items.len() as u64) < j {
            let ins = self.params.sample(&mut entry.stream);
            entry.items.push(ins);
        }
        entry.items[(j - 1) as usize]
    }
}

/// Fixed finite stacks for hand-built tests. Reading past the provided
/// prefix panics: a test that does so is underspecified.
pub struct ExplicitStacks {
    sites: HashMap<i64, Vec<Instruction>>,
}

impl ExplicitStacks {
    pub fn new(sites: HashMap<i64, Vec<Instruction>>) -> Self {
        ExplicitStacks { sites }
    }

    pub fn from_pairs(pairs: &[(i64, &[Instruction])]) -> Self {
        let mut sites = HashMap::new();
        for (x, items) in pairs {
            sites.insert(*x, items.to_vec());
        }
        ExplicitStacks { sites }
    }
}

impl Stacks for ExplicitStacks {
    fn instruction(&self, site: i64, j: u64) -> Instruction {
        let items = self
            .sites
            .get(&site)
            .unwrap_or_else(|| panic!("no stack defined at site {site}"));
        items
            .get((j - 1) as usize)
            .copied()
            .unwrap_or_else(|| panic!("stack at site {site} exhausted at index {j}"))
    }
}

/// Overlay inserting one extra Sleep at composite position `index` of
/// `site`; later instructions shift up by one. This is the elementary
/// monotone perturbation on stacks.
pub struct SleepInserted<'a> {
    base: &'a dyn Stacks,
    site: i64,
    index: u64,
}

impl<'a> SleepInserted<'a> {
    pub fn new(base: &'a dyn Stacks, site: i64, index: u64) -> Result<Self> {
        if index < 1 {
            return Err(Error::parameter("insertion index must be >= 1".to_string()));
        }
        Ok(SleepInserted { base, site, index })
    }
}

impl Stacks for SleepInserted<'_> {
    fn instruction(&self, site: i64, j: u64) -> Instruction {
        if site != self.site || j < self.index {
            self.base.instruction(site, j)
        } else if j == self.index {
            Instruction::Sleep
        } else {
            self.base.instruction(site, j - 1)
        }
    }
}

/// Memoized view of the jump subsequence and sleep gaps of a stack.
///
/// `jump_position(x, k)` is the composite index j of the k-th jump at x
/// (1-based), `jump(x, k)` its instruction, and `sleep_gap(x, k)` the
/// number of sleeps between jumps k-1 and k.
pub struct JumpView<'a> {
    base: &'a dyn Stacks,
    // positions[x][k-1] = composite index of the k-th jump at x
    positions: RefCell<HashMap<i64, Vec<u64>>>,
}

impl<'a> JumpView<'a> {
    pub fn new(base: &'a dyn Stacks) -> Self {
        JumpView {
            base,
            positions: RefCell::new(HashMap::new()),
        }
    }

    pub fn base(&self) -> &'a dyn Stacks {
        self.base
    }

    pub fn jump_position(&self, site: i64, k: u64) -> u64 {
        assert!(k >= 1, "jump index is 1-based");
        let mut map = self.positions.borrow_mut();
        let positions = map.entry(site).or_default();
        while (positions.len() as u64) < k {
            let mut j = positions.last().map_or(0, |&last| last) + 1;
            while !self.base.instruction(site, j).is_jump() {
                j += 1;
            }
            positions.push(j);
        }
        positions[(k - 1) as usize]
    }

    pub fn jump(&self, site: i64, k: u64) -> Instruction {
        let j = self.jump_position(site, k);
        self.base.instruction(site, j)
    }

    /// D_{x,k}: sleeps strictly between jump k-1 and jump k.
    pub fn sleep_gap(&self, site: i64, k: u64) -> u64 {
        let hi = self.jump_position(site, k);
        let lo = if k == 1 {
            0
        } else {
            self.jump_position(site, k - 1)
        };
        hi - lo - 1
    }
}

/// Composite stacks rebuilt from a jump view plus sparse unit sleep
/// counts: site x carries the jump sequence of the base realization with a
/// single Sleep inserted before jump k for every `(x, k)` in `traps`.
///
/// This is the certificate-replay configuration: D'' = 1 at the traps and
/// 0 everywhere else.
pub struct SparseSleepStacks<'a> {
    jumps: &'a JumpView<'a>,
    // site -> sorted jump indices k with a sleep inserted before jump k
    traps: HashMap<i64, Vec<u64>>,
}

impl<'a> SparseSleepStacks<'a> {
    pub fn new(jumps: &'a JumpView<'a>, traps: impl IntoIterator<Item = (i64, u64)>) -> Self {
        let mut map: HashMap<i64, Vec<u64>> = HashMap::new();
        for (site, k) in traps {
            map.entry(site).or_default().push(k);
        }
        for ks in map.values_mut() {
            ks.sort_unstable();
        }
        SparseSleepStacks { jumps, traps: map }
    }
}

impl Stacks for SparseSleepStacks<'_> {
    fn instruction(&self, site: i64, j: u64) -> Instruction {
        // With sleeps before jumps k_1 < k_2 < …, the sleep before k_i sits
        // at composite position k_i + i - 1 and jump k at position
        // k + #{i : k_i <= k}.
        if let Some(ks) = self.traps.get(&site) {
            for (i, &k) in ks.iter().enumerate() {
                let sleep_pos = k + i as u64;
                if j == sleep_pos {
                    return Instruction::Sleep;
                }
                if j < sleep_pos {
                    // j precedes the i-th inserted sleep: i sleeps inserted
                    // before position j so far.
                    return self.jumps.jump(site, j - i as u64);
                }
            }
            let total = ks.len() as u64;
            self.jumps.jump(site, j - total)
        } else {
            self.jumps.jump(site, j)
        }
    }
}
