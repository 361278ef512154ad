//! Thread-count control for the enumeration workloads.

use rayon::ThreadPoolBuilder;

/// Runs `f` inside a dedicated pool of `threads` workers, or on the global
/// pool when `threads` is `None`.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(t) => ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("failed to build thread pool")
            .install(f),
        None => f(),
    }
}

/// Splits `[start, end)` into contiguous chunks of roughly equal length.
pub(crate) fn chunk_ranges(start: u64, end: u64, chunks: u64) -> Vec<(u64, u64)> {
    let len = end.saturating_sub(start);
    if len == 0 {
        return Vec::new();
    }
    let chunks = chunks.clamp(1, len);
    let step = len.div_ceil(chunks);
    (0..chunks)
        .map(|i| (start + i * step, (start + (i + 1) * step).min(end)))
        .filter(|(a, b)| a < b)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range() {
        for (s, e, c) in [(1u64, 100u64, 7u64), (0, 5, 10), (3, 3, 4), (1, 4096, 64)] {
            let ranges = chunk_ranges(s, e, c);
            let total: u64 = ranges.iter().map(|(a, b)| b - a).sum();
            assert_eq!(total, e - s);
            for w in ranges.windows(2) {
                assert_eq!(w[0].1, w[1].0);
            }
        }
    }
}
