//! Direct-indexed, replace-always best-move table used for move ordering.

/// Stores the index of the best action (in static move order) per state key.
/// Clearing is O(1): entries carry a generation stamp.
#[derive(Debug, Clone)]
pub struct TranspositionTable {
    keys: Vec<u64>,
    moves: Vec<u16>,
    stamps: Vec<u32>,
    generation: u32,
    mask: usize,
}

impl TranspositionTable {
    pub const DEFAULT_BITS: u32 = 20;

    pub fn new(bits: u32) -> Self {
        let n = 1usize << bits.min(30);
        TranspositionTable {
            keys: vec![0; n],
            moves: vec![0; n],
            stamps: vec![0; n],
            generation: 1,
            mask: n - 1,
        }
    }

    pub fn capacity(&self) -> usize {
        self.keys.len()
    }

    pub fn probe(&self, key: u64) -> Option<usize> {
        let i = key as usize & self.mask;
        (self.stamps[i] == self.generation && self.keys[i] == key).then(|| self.moves[i] as usize)
    }

    pub fn store(&mut self, key: u64, action_index: usize) {
        let i = key as usize & self.mask;
        self.keys[i] = key;
        self.moves[i] = action_index as u16;
        self.stamps[i] = self.generation;
    }

    pub fn clear(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamps.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
    }
}

impl Default for TranspositionTable {
    fn default() -> Self {
        Self::new(Self::DEFAULT_BITS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_key_returns_stored_move() {
        let mut tt = TranspositionTable::new(4);
        tt.store(0xABCD, 3);
        assert_eq!(tt.probe(0xABCD), Some(3));
        assert_eq!(tt.probe(0xABCE), None);
        // same slot, different key: replace always
        tt.store(0xABCD + 16, 1);
        assert_eq!(tt.probe(0xABCD), None);
        assert_eq!(tt.probe(0xABCD + 16), Some(1));
        tt.clear();
        assert_eq!(tt.probe(0xABCD + 16), None);
        assert_eq!(tt.capacity(), 16);
    }
}
