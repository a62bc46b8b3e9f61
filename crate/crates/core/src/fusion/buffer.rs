use std::collections::VecDeque;

use crate::label::{EmotionLabel, NUM_CLASSES};

use super::{FusionError, Vote, VoteSource, NUM_SOURCES};

/// One sealed instance: a label (or unavailable) per vote source.
pub type Column = [Option<EmotionLabel>; NUM_SOURCES];

/// Vote counts indexed by emotion code.
pub type Tally = [u64; NUM_CLASSES];

#[derive(Debug, Clone, PartialEq)]
struct OpenColumn {
    cells: Column,
    occupied: [bool; NUM_SOURCES],
    opened_at: u64,
}

impl OpenColumn {
    fn new(tick: u64) -> Self {
        OpenColumn { cells: [None; NUM_SOURCES], occupied: [false; NUM_SOURCES], opened_at: tick }
    }
}

/// What a push did to the buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PushOutcome {
    /// The open column was sealed before this vote was placed.
    pub sealed: bool,
}

/// Instance columns of modality votes. Only sealed columns count toward
/// the tally.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultBuffer {
    capacity: usize,
    sealed: VecDeque<Column>,
    open: Option<OpenColumn>,
}

impl ResultBuffer {
    pub fn new(capacity: usize) -> Result<Self, FusionError> {
        if capacity == 0 {
            return Err(FusionError::Config("buffer capacity must be at least 1".into()));
        }
        Ok(ResultBuffer { capacity, sealed: VecDeque::with_capacity(capacity), open: None })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.sealed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sealed.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.sealed.len() >= self.capacity
    }

    pub fn sealed_columns(&self) -> impl Iterator<Item = &Column> {
        self.sealed.iter()
    }

    /// Cells of the open column, if any.
    pub fn open_column(&self) -> Option<&Column> {
        self.open.as_ref().map(|c| &c.cells)
    }

    pub fn open_since(&self) -> Option<u64> {
        self.open.as_ref().map(|c| c.opened_at)
    }

    /// Places a vote in the open column. A second vote from the same source
    /// seals the column first and starts a new one. An explicit unavailable
    /// vote occupies the source's slot without adding to the tally.
    pub fn push_vote(&mut self, vote: Vote) -> PushOutcome {
        let slot = vote.source.index();
        let mut sealed = false;
        if self.open.as_ref().is_some_and(|c| c.occupied[slot]) {
            self.close_instance();
            sealed = true;
        }
        let col = self.open.get_or_insert_with(|| OpenColumn::new(vote.tick));
        col.cells[slot] = vote.label;
        col.occupied[slot] = true;
        PushOutcome { sealed }
    }

    /// Seals the open column; silent sources stay unavailable. Returns false
    /// when nothing was open.
    pub fn close_instance(&mut self) -> bool {
        match self.open.take() {
            Some(col) => {
                self.sealed.push_back(col.cells);
                true
            }
            None => false,
        }
    }

    /// Appends an already sealed column.
    pub fn push_column(&mut self, column: Column) {
        self.sealed.push_back(column);
    }

    pub fn tally(&self) -> Tally {
        tally_columns(self.sealed.iter())
    }

    /// Majority label over a full buffer; `Ok(None)` is a no-decision.
    pub fn final_prediction(&self) -> Result<Option<EmotionLabel>, FusionError> {
        if !self.is_full() {
            return Err(FusionError::NotReady { sealed: self.sealed.len(), capacity: self.capacity });
        }
        Ok(decide(self.sealed.iter().take(self.capacity)).0)
    }

    pub fn clear(&mut self) {
        self.sealed.clear();
        self.open = None;
    }

    pub fn drop_oldest(&mut self) -> Option<Column> {
        self.sealed.pop_front()
    }
}

pub fn tally_columns<'a>(columns: impl IntoIterator<Item = &'a Column>) -> Tally {
    let mut t = [0u64; NUM_CLASSES];
    for col in columns {
        for label in col.iter().flatten() {
            t[label.index()] += 1;
        }
    }
    t
}

/// Argmax of the tally. Ties go to the label with most votes in the last
/// column, then the lowest code. An empty tally is a no-decision.
pub fn decide<'a>(columns: impl IntoIterator<Item = &'a Column>) -> (Option<EmotionLabel>, Tally) {
    let columns: Vec<&Column> = columns.into_iter().collect();
    let tally = tally_columns(columns.iter().copied());
    let best = *tally.iter().max().unwrap_or(&0);
    if best == 0 {
        return (None, tally);
    }
    let latest = columns.last().map(|c| tally_columns([*c])).unwrap_or([0; NUM_CLASSES]);
    let winner = EmotionLabel::ALL
        .iter()
        .copied()
        .filter(|l| tally[l.index()] == best)
        .max_by(|a, b| latest[a.index()].cmp(&latest[b.index()]).then(b.cmp(a)))
        .expect("at least one label reaches the maximum");
    (Some(winner), tally)
}

/// Source-major view: the label each source cast in every column.
pub fn source_row<'a>(columns: impl IntoIterator<Item = &'a Column>, source: VoteSource) -> Vec<Option<EmotionLabel>> {
    columns.into_iter().map(|c| c[source.index()]).collect()
}
