//! Ulam sequence generation.
//!
//! Two generators produce the same output: [`generate_oracle`] follows the
//! definition literally (count representations of every candidate), and
//! [`generate_fast`] keeps bit-arrays of values with at least one and at
//! least two representations and updates them with word-level shifts.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("invalid generation config: {0}")]
    InvalidConfig(&'static str),
    #[error("next term overflows 64 bits after {reached} terms")]
    Overflow { reached: usize },
    #[error("cannot allocate bit-arrays for {requested_bits} bits (terms generated so far: {reached}, largest {largest})")]
    OutOfMemory {
        requested_bits: u64,
        reached: usize,
        largest: u64,
    },
    #[error("terms are not strictly increasing at index {index}")]
    NotIncreasing { index: usize },
    #[error("a sequence needs at least two terms, got {0}")]
    TooShort(usize),
}

/// Stopping rule for generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// Generate exactly this many terms.
    Count(usize),
    /// Generate every term `<=` this value.
    Limit(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationConfig {
    pub first: u64,
    pub second: u64,
    pub target: Target,
}

impl GenerationConfig {
    /// Ulam(1, 2) up to `n` terms.
    pub fn count(n: usize) -> Self {
        Self {
            first: 1,
            second: 2,
            target: Target::Count(n),
        }
    }

    /// Ulam(1, 2) up to the value `v`.
    pub fn limit(v: u64) -> Self {
        Self {
            first: 1,
            second: 2,
            target: Target::Limit(v),
        }
    }

    pub fn with_seeds(mut self, first: u64, second: u64) -> Self {
        self.first = first;
        self.second = second;
        self
    }

    pub fn validate(&self) -> Result<(), SequenceError> {
        if self.first == 0 {
            return Err(SequenceError::InvalidConfig("first term must be at least 1"));
        }
        if self.first >= self.second {
            return Err(SequenceError::InvalidConfig("first term must be smaller than second"));
        }
        match self.target {
            Target::Count(n) if n < 2 => Err(SequenceError::InvalidConfig("term count must be at least 2")),
            Target::Limit(v) if v < self.second => {
                Err(SequenceError::InvalidConfig("value limit must be at least the second term"))
            }
            _ => Ok(()),
        }
    }

    fn wants_more(&self, len: usize) -> bool {
        match self.target {
            Target::Count(n) => len < n,
            Target::Limit(_) => true,
        }
    }

    fn value_limit(&self) -> Option<u64> {
        match self.target {
            Target::Limit(v) => Some(v),
            Target::Count(_) => None,
        }
    }
}

/// A strictly increasing list of terms. Formulas index terms from 1
/// (`term(1)` is the first seed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UlamSequence {
    terms: Vec<u64>,
    config: GenerationConfig,
}

impl UlamSequence {
    /// Wraps an arbitrary strictly increasing list. Used for cached data and
    /// for synthetic inputs; nothing checks that the list obeys the Ulam rule.
    pub fn from_terms(terms: Vec<u64>) -> Result<Self, SequenceError> {
        if terms.len() < 2 {
            return Err(SequenceError::TooShort(terms.len()));
        }
        if let Some(index) = terms.windows(2).position(|w| w[0] >= w[1]) {
            return Err(SequenceError::NotIncreasing { index: index + 2 });
        }
        let config = GenerationConfig {
            first: terms[0],
            second: terms[1],
            target: Target::Count(terms.len()),
        };
        Ok(Self { terms, config })
    }

    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    pub fn config(&self) -> &GenerationConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `a_n`, 1-based. Panics when `n` is 0 or past the end.
    #[inline]
    pub fn term(&self, n: usize) -> u64 {
        assert!(n >= 1, "terms are indexed from 1");
        self.terms[n - 1]
    }

    pub fn last(&self) -> u64 {
        *self.terms.last().expect("sequence has at least two terms")
    }

    pub fn contains(&self, x: u64) -> bool {
        self.terms.binary_search(&x).is_ok()
    }

    /// The first `n` terms as a sequence of their own.
    pub fn prefix(&self, n: usize) -> Result<Self, SequenceError> {
        let n = n.min(self.terms.len());
        let mut seq = Self::from_terms(self.terms[..n].to_vec())?;
        seq.config.first = self.config.first;
        seq.config.second = self.config.second;
        Ok(seq)
    }

    /// Smallest `x` in `(a_2, a_N]` for which membership disagrees with
    /// "exactly one representation". Quadratic in the length; meant for
    /// verification of moderate prefixes.
    pub fn first_sieve_violation(&self) -> Option<u64> {
        let lo = self.term(2) + 1;
        let hi = self.last();
        let mut next_member = 2usize;
        for x in lo..=hi {
            let below = self.terms.partition_point(|&t| t < x);
            let unique = representation_count(x, &self.terms[..below]) == 1;
            let member = self.terms.get(next_member) == Some(&x);
            if member {
                next_member += 1;
            }
            if unique != member {
                return Some(x);
            }
        }
        None
    }
}

/// Number of pairs `i < j` with `terms[i] + terms[j] == x`. `terms` must be
/// strictly increasing, so equal-index sums like `4 + 4` never count.
pub fn representation_count(x: u64, terms: &[u64]) -> usize {
    if terms.len() < 2 {
        return 0;
    }
    let x = x as u128;
    let (mut i, mut j) = (0usize, terms.len() - 1);
    let mut count = 0;
    while i < j {
        let sum = terms[i] as u128 + terms[j] as u128;
        match sum.cmp(&x) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j -= 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j -= 1;
            }
        }
    }
    count
}

/// Literal generator: test every candidate above the last term with
/// [`representation_count`]. Cost is roughly `a_N * N`.
pub fn generate_oracle(config: GenerationConfig) -> Result<UlamSequence, SequenceError> {
    config.validate()?;
    let limit = config.value_limit();
    let mut terms = vec![config.first, config.second];
    'outer: while config.wants_more(terms.len()) {
        let mut x = *terms.last().unwrap();
        loop {
            x = x
                .checked_add(1)
                .ok_or(SequenceError::Overflow { reached: terms.len() })?;
            if limit.is_some_and(|v| x > v) {
                break 'outer;
            }
            if representation_count(x, &terms) == 1 {
                terms.push(x);
                break;
            }
        }
    }
    Ok(UlamSequence { terms, config })
}

/// Bit-parallel generator. Output is identical to [`generate_oracle`].
///
/// Memory is three bit-arrays covering values up to twice the last term
/// (capped at the value limit when one is set).
pub fn generate_fast(config: GenerationConfig) -> Result<UlamSequence, SequenceError> {
    config.validate()?;
    let limit = config.value_limit();
    let mut sieve = Sieve::new(config.first, limit);
    let mut terms = Vec::new();
    for seed in [config.first, config.second] {
        sieve.append(seed, &terms)?;
        terms.push(seed);
    }
    while config.wants_more(terms.len()) {
        let last = *terms.last().unwrap();
        match sieve.next_after(last) {
            Some(x) => {
                sieve.append(x, &terms)?;
                terms.push(x);
            }
            None => break,
        }
    }
    Ok(UlamSequence { terms, config })
}

const WORD: u64 = 64;

/// Membership plus "one representation" / "two or more" bit-arrays.
struct Sieve {
    members: Vec<u64>,
    once: Vec<u64>,
    twice: Vec<u64>,
    smallest: u64,
    limit: Option<u64>,
}

impl Sieve {
    fn new(smallest: u64, limit: Option<u64>) -> Self {
        Self {
            members: Vec::new(),
            once: Vec::new(),
            twice: Vec::new(),
            smallest,
            limit,
        }
    }

    fn ensure_bits(&mut self, bits: u64, terms: &[u64]) -> Result<(), SequenceError> {
        let have = self.members.len() as u64 * WORD;
        if bits <= have {
            return Ok(());
        }
        let mut want = have.max(1024);
        while want < bits {
            want = want.saturating_mul(2);
        }
        if let Some(v) = self.limit {
            want = want.min(v + 1).max(bits);
        }
        let words = want.div_ceil(WORD);
        let oom = || SequenceError::OutOfMemory {
            requested_bits: words * WORD,
            reached: terms.len(),
            largest: terms.last().copied().unwrap_or(0),
        };
        let words = usize::try_from(words).map_err(|_| oom())?;
        for v in [&mut self.members, &mut self.once, &mut self.twice] {
            v.try_reserve_exact(words - v.len()).map_err(|_| oom())?;
            v.resize(words, 0);
        }
        Ok(())
    }

    /// Records term `t`: every earlier term `a` contributes the sum `t + a`.
    fn append(&mut self, t: u64, terms: &[u64]) -> Result<(), SequenceError> {
        let top = t
            .checked_mul(2)
            .ok_or(SequenceError::Overflow { reached: terms.len() })?;
        let top = match self.limit {
            Some(v) => top.min(v.saturating_add(1)),
            None => top,
        };
        self.ensure_bits(top.max(t + 1), terms)?;

        if !terms.is_empty() && t + self.smallest < top {
            let q = (t / WORD) as usize;
            let r = (t % WORD) as u32;
            let lo = ((t + self.smallest) / WORD) as usize;
            let hi = ((top - 1) / WORD) as usize;
            let members = &self.members;
            let once = &mut self.once[lo..=hi];
            let twice = &mut self.twice[lo..=hi];
            for (k, (o, w)) in once.iter_mut().zip(twice.iter_mut()).enumerate() {
                let src = lo + k - q;
                let shifted = if r == 0 {
                    members[src]
                } else {
                    let carry = if src > 0 { members[src - 1] >> (64 - r) } else { 0 };
                    (members[src] << r) | carry
                };
                *w |= *o & shifted;
                *o |= shifted;
            }
        }
        self.members[(t / WORD) as usize] |= 1 << (t % WORD);
        Ok(())
    }

    /// Smallest value above `t` with exactly one representation, or `None`
    /// once the value limit is passed.
    fn next_after(&self, t: u64) -> Option<u64> {
        let start = t + 1;
        let end_bits = self.members.len() as u64 * WORD;
        let end = match self.limit {
            Some(v) => end_bits.min(v + 1),
            None => end_bits,
        };
        if start >= end {
            return None;
        }
        let mut word = (start / WORD) as usize;
        let mut mask = !0u64 << (start % WORD);
        while (word as u64) * WORD < end {
            let hits = self.once[word] & !self.twice[word] & mask;
            if hits != 0 {
                let x = word as u64 * WORD + hits.trailing_zeros() as u64;
                return (x < end).then_some(x);
            }
            word += 1;
            mask = !0;
        }
        // Without a limit the next term is below 2t (it is at most t + a_{n-2}),
        // and the arrays always cover that range.
        assert!(self.limit.is_some(), "no candidate below twice the last term");
        None
    }
}
