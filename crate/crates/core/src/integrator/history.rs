use crate::{Scalar, Vector};

/// Sliding window of the most recent positions on the step grid.
///
/// Each coordinate is stored twice in a buffer of length `2 * capacity`, so
/// the live window, oldest to newest, is always one contiguous slice.
#[derive(Debug, Clone)]
pub struct HistoryBuffer<T> {
    window_steps: usize,
    dt: T,
    xs: Vec<T>,
    ys: Vec<T>,
    /// slot of the newest entry, in `0..capacity`
    newest: usize,
    filled: usize,
}

impl<T: Scalar> HistoryBuffer<T> {
    /// Holds `window_steps + 1` points spanning `window_steps * dt`.
    pub fn new(window_steps: usize, dt: T) -> Self {
        assert!(window_steps >= 1, "window must span at least one step");
        let cap = window_steps + 1;
        Self {
            window_steps,
            dt,
            xs: vec![T::zero(); 2 * cap],
            ys: vec![T::zero(); 2 * cap],
            newest: cap - 1,
            filled: 0,
        }
    }

    pub fn window_steps(&self) -> usize {
        self.window_steps
    }

    pub fn capacity(&self) -> usize {
        self.window_steps + 1
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Time span covered by a full window.
    pub fn span(&self) -> T {
        T::of_usize(self.window_steps) * self.dt
    }

    pub fn len(&self) -> usize {
        self.filled
    }

    pub fn is_empty(&self) -> bool {
        self.filled == 0
    }

    pub fn is_full(&self) -> bool {
        self.filled == self.capacity()
    }

    pub fn push(&mut self, p: Vector<T>) {
        let cap = self.capacity();
        self.newest = (self.newest + 1) % cap;
        self.xs[self.newest] = p.x;
        self.xs[self.newest + cap] = p.x;
        self.ys[self.newest] = p.y;
        self.ys[self.newest + cap] = p.y;
        self.filled = (self.filled + 1).min(cap);
    }

    /// Live `(x, y)` coordinates, oldest first.
    #[inline]
    pub fn window(&self) -> (&[T], &[T]) {
        let end = self.newest + self.capacity() + 1;
        let start = end - self.filled;
        (&self.xs[start..end], &self.ys[start..end])
    }

    pub fn newest(&self) -> Option<Vector<T>> {
        self.get(self.filled.checked_sub(1)?)
    }

    pub fn oldest(&self) -> Option<Vector<T>> {
        self.get(0)
    }

    /// Entry `j`, counted from the oldest.
    pub fn get(&self, j: usize) -> Option<Vector<T>> {
        let (xs, ys) = self.window();
        Some(Vector::new(*xs.get(j)?, ys[j]))
    }

    /// Time of entry `j` when the newest entry sits at time `now`.
    pub fn time_of(&self, j: usize, now: T) -> T {
        now - T::of_usize(self.filled - 1 - j) * self.dt
    }
}
