//! Particle state and the elementary step operator.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{PoissonLaw, SeededStream};

use super::stack::Stacks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParticleState {
    Active,
    Passive,
}

/// Per-site bookkeeping: how many particles sit here and which of them are
/// passive. A passive particle can only share a site transiently, before
/// the arrival that woke it is processed, so `passive` is almost always
/// empty or a singleton.
#[derive(Debug, Clone, Default)]
struct SiteCell {
    total: u32,
    passive: Vec<u32>,
}

/// Finite-box particle configuration with envelope counters.
///
/// `j` counts all instructions burned per site, `r` only the jump
/// instructions (the odometer). Both are nondecreasing along any run and
/// `r[x] <= j[x]` everywhere.
#[derive(Debug, Clone)]
pub struct ArwState {
    positions: Vec<i64>,
    states: Vec<ParticleState>,
    j: HashMap<i64, u64>,
    r: HashMap<i64, u64>,
    cells: HashMap<i64, SiteCell>,
    box_radius: i64,
    passive_count: usize,
}

/// What a single labeled step did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// The labeled particle was passive; nothing happened, nothing burned.
    Null,
    Slept,
    FailedSleep,
    Jumped { from: i64, to: i64 },
}

impl StepOutcome {
    pub fn burned_instruction(self) -> bool {
        !matches!(self, StepOutcome::Null)
    }
}

impl ArwState {
    pub fn from_particles(particles: &[(i64, ParticleState)], box_radius: i64) -> Self {
        let mut state = ArwState {
            positions: Vec::with_capacity(particles.len()),
            states: Vec::with_capacity(particles.len()),
            j: HashMap::new(),
            r: HashMap::new(),
            cells: HashMap::new(),
            box_radius,
            passive_count: 0,
        };
        for &(x, s) in particles {
            let idx = state.positions.len() as u32;
            state.positions.push(x);
            state.states.push(s);
            let cell = state.cells.entry(x).or_default();
            cell.total += 1;
            if s == ParticleState::Passive {
                cell.passive.push(idx);
                state.passive_count += 1;
            }
        }
        state
    }

    /// i.i.d. Poisson(μ) active particles at every site of [-M, M].
    pub fn init(mu: f64, box_radius: i64, stream: &mut SeededStream) -> Result<Self> {
        if box_radius < 0 {
            return Err(Error::parameter("box radius must be nonnegative".to_string()));
        }
        let law = PoissonLaw::new(mu)?;
        let mut particles = Vec::new();
        for x in -box_radius..=box_radius {
            let n = law.sample(stream);
            for _ in 0..n {
                particles.push((x, ParticleState::Active));
            }
        }
        Ok(Self::from_particles(&particles, box_radius))
    }

    pub fn particle_count(&self) -> usize {
        self.positions.len()
    }

    pub fn box_radius(&self) -> i64 {
        self.box_radius
    }

    pub fn position(&self, n: usize) -> i64 {
        self.positions[n]
    }

    pub fn particle_state(&self, n: usize) -> ParticleState {
        self.states[n]
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn is_active(&self, n: usize) -> bool {
        self.states[n] == ParticleState::Active
    }

    pub fn all_passive(&self) -> bool {
        self.passive_count == self.positions.len()
    }

    pub fn active_count(&self) -> usize {
        self.positions.len() - self.passive_count
    }

    pub fn occupancy(&self, x: i64) -> u32 {
        self.cells.get(&x).map_or(0, |c| c.total)
    }

    /// Envelopes burned at x.
    pub fn j_at(&self, x: i64) -> u64 {
        self.j.get(&x).copied().unwrap_or(0)
    }

    /// Jump envelopes burned at x (the odometer).
    pub fn r_at(&self, x: i64) -> u64 {
        self.r.get(&x).copied().unwrap_or(0)
    }

    pub fn j_map(&self) -> &HashMap<i64, u64> {
        &self.j
    }

    pub fn r_map(&self) -> &HashMap<i64, u64> {
        &self.r
    }

    /// Multiset of final positions as site -> particle count.
    pub fn occupation(&self) -> HashMap<i64, u32> {
        self.cells
            .iter()
            .filter(|(_, c)| c.total > 0)
            .map(|(&x, c)| (x, c.total))
            .collect()
    }

    /// Removes particle `n` from the configuration (monotone perturbation).
    /// Indices above `n` shift down by one.
    pub fn remove_particle(&mut self, n: usize) -> Result<()> {
        if n >= self.positions.len() {
            return Err(Error::parameter(format!("no particle {n}")));
        }
        let x = self.positions[n];
        let cell = self.cells.get_mut(&x).expect("cell of existing particle");
        cell.total -= 1;
        if self.states[n] == ParticleState::Passive {
            cell.passive.retain(|&i| i != n as u32);
            self.passive_count -= 1;
        }
        self.positions.remove(n);
        self.states.remove(n);
        // Reindex passive lists after the removal.
        for cell in self.cells.values_mut() {
            for idx in cell.passive.iter_mut() {
                if *idx > n as u32 {
                    *idx -= 1;
                }
            }
        }
        Ok(())
    }

    /// Turns particle `n` passive in place (monotone perturbation).
    pub fn passify_particle(&mut self, n: usize) -> Result<()> {
        if n >= self.positions.len() {
            return Err(Error::parameter(format!("no particle {n}")));
        }
        if self.states[n] == ParticleState::Passive {
            return Ok(());
        }
        self.states[n] = ParticleState::Passive;
        self.passive_count += 1;
        let x = self.positions[n];
        self.cells.get_mut(&x).unwrap().passive.push(n as u32);
        Ok(())
    }

    /// Forced jump by displacement `d`, used by the sleep-free sweep
    /// coupling: burns one jump envelope at the current site (both
    /// counters advance) and moves the particle. Passive particles at the
    /// destination wake as usual.
    pub fn force_jump(&mut self, n: usize, d: i64) {
        let x = self.positions[n];
        *self.j.entry(x).or_insert(0) += 1;
        *self.r.entry(x).or_insert(0) += 1;
        let to = x + d;
        self.cells.get_mut(&x).unwrap().total -= 1;
        let dst = self.cells.entry(to).or_default();
        dst.total += 1;
        self.positions[n] = to;
        for idx in dst.passive.drain(..) {
            self.states[idx as usize] = ParticleState::Active;
            self.passive_count -= 1;
        }
    }

    /// Burns the next instruction for particle `n` (the n·X update).
    ///
    /// Passive particles do nothing. An active particle at x burns
    /// F_{x, j_x+1}: a jump moves it and wakes every passive particle at
    /// the destination; a sleep puts it passive iff it is alone at x. The
    /// instruction is burned either way.
    pub fn step(&mut self, stacks: &dyn Stacks, n: usize) -> Result<StepOutcome> {
        let mut sink = Vec::new();
        self.step_collect(stacks, n, &mut sink)
    }

    /// Like [`ArwState::step`] but appends the indices of particles woken
    /// by the move into `woken` (cleared first). Schedulers use this to
    /// maintain their active pools without rescanning.
    pub fn step_collect(
        &mut self,
        stacks: &dyn Stacks,
        n: usize,
        woken: &mut Vec<u32>,
    ) -> Result<StepOutcome> {
        woken.clear();
        if n >= self.positions.len() {
            return Err(Error::parameter(format!(
                "particle index {n} out of range (m = {})",
                self.positions.len()
            )));
        }
        if self.states[n] == ParticleState::Passive {
            return Ok(StepOutcome::Null);
        }
        let x = self.positions[n];
        let j_next = self.j_at(x) + 1;
        let instruction = stacks.instruction(x, j_next);
        *self.j.entry(x).or_insert(0) += 1;

        match instruction.displacement() {
            0 => {
                let alone = self.cells[&x].total == 1;
                if alone {
                    self.states[n] = ParticleState::Passive;
                    self.passive_count += 1;
                    self.cells.get_mut(&x).unwrap().passive.push(n as u32);
                    Ok(StepOutcome::Slept)
                } else {
                    Ok(StepOutcome::FailedSleep)
                }
            }
            d => {
                *self.r.entry(x).or_insert(0) += 1;
                let to = x + d;
                {
                    let src = self.cells.get_mut(&x).unwrap();
                    src.total -= 1;
                }
                let dst = self.cells.entry(to).or_default();
                dst.total += 1;
                self.positions[n] = to;
                // Arrival wakes every passive particle at the destination.
                for idx in dst.passive.drain(..) {
                    self.states[idx as usize] = ParticleState::Active;
                    self.passive_count -= 1;
                    woken.push(idx);
                }
                Ok(StepOutcome::Jumped { from: x, to })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arw::stack::{ExplicitStacks, Instruction::*};

    #[test]
    fn init_empty_for_zero_mu() {
        let mut s = SeededStream::new(1, 0);
        let state = ArwState::init(0.0, 10, &mut s).unwrap();
        assert_eq!(state.particle_count(), 0);
        assert!(state.all_passive());
    }

    #[test]
    fn init_total_count_matches_poisson_mean() {
        // (2M+1)·μ = 101 expected particles; 3 SE over 1000 trials.
        let mut total = 0u64;
        let trials = 1000u64;
        for t in 0..trials {
            let mut s = SeededStream::new(77, t);
            let state = ArwState::init(1.0, 50, &mut s).unwrap();
            total += state.particle_count() as u64;
        }
        let mean = total as f64 / trials as f64;
        let se = (101.0f64 / trials as f64).sqrt();
        assert!((mean - 101.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn init_single_site_zero_probability() {
        // M = 0, μ = 0.5: P(no particles) = e^{-1/2}.
        let trials = 20_000u64;
        let empty = (0..trials)
            .filter(|&t| {
                let mut s = SeededStream::new(78, t);
                ArwState::init(0.5, 0, &mut s).unwrap().particle_count() == 0
            })
            .count() as f64;
        let p = empty / trials as f64;
        let p0 = (-0.5f64).exp();
        let se = (p0 * (1.0 - p0) / trials as f64).sqrt();
        assert!((p - p0).abs() < 3.0 * se, "p {p}");
    }

    #[test]
    fn lone_particle_sleeps() {
        let stacks = ExplicitStacks::from_pairs(&[(0, &[Sleep])]);
        let mut state = ArwState::from_particles(&[(0, ParticleState::Active)], 1);
        let out = state.step(&stacks, 0).unwrap();
        assert_eq!(out, StepOutcome::Slept);
        assert_eq!(state.particle_state(0), ParticleState::Passive);
        assert_eq!(state.j_at(0), 1);
        assert_eq!(state.r_at(0), 0);
    }

    #[test]
    fn crowded_sleep_burns_but_fails() {
        let stacks = ExplicitStacks::from_pairs(&[(0, &[Sleep])]);
        let mut state = ArwState::from_particles(
            &[(0, ParticleState::Active), (0, ParticleState::Active)],
            1,
        );
        let out = state.step(&stacks, 0).unwrap();
        assert_eq!(out, StepOutcome::FailedSleep);
        assert!(state.is_active(0));
        assert_eq!(state.j_at(0), 1);
        assert_eq!(state.r_at(0), 0);
    }

    #[test]
    fn arrival_wakes_passive() {
        let stacks = ExplicitStacks::from_pairs(&[(0, &[JumpRight])]);
        let mut state = ArwState::from_particles(
            &[(0, ParticleState::Active), (1, ParticleState::Passive)],
            2,
        );
        let out = state.step(&stacks, 0).unwrap();
        assert_eq!(out, StepOutcome::Jumped { from: 0, to: 1 });
        assert!(state.is_active(0));
        assert!(state.is_active(1));
        assert_eq!(state.j_at(0), 1);
        assert_eq!(state.r_at(0), 1);
        assert_eq!(state.occupancy(1), 2);
    }

    #[test]
    fn step_on_passive_is_null() {
        let stacks = ExplicitStacks::from_pairs(&[(0, &[Sleep])]);
        let mut state = ArwState::from_particles(&[(0, ParticleState::Passive)], 1);
        assert_eq!(state.step(&stacks, 0).unwrap(), StepOutcome::Null);
        assert_eq!(state.j_at(0), 0);
    }

    #[test]
    fn out_of_range_index_is_error() {
        let stacks = ExplicitStacks::from_pairs(&[(0, &[Sleep])]);
        let mut state = ArwState::from_particles(&[(0, ParticleState::Active)], 1);
        assert!(state.step(&stacks, 3).is_err());
    }
}
