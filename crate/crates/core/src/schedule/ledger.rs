use std::sync::atomic::{AtomicUsize, Ordering};

/// Live and high-water counts of strip temporaries and interface storage.
#[derive(Debug, Default)]
pub struct MemoryLedger {
    live_strips: AtomicUsize,
    peak_strips: AtomicUsize,
    interface_buffers: AtomicUsize,
    interface_bytes: AtomicUsize,
    peak_interface_bytes: AtomicUsize,
    /// Strip temporaries ever leased.
    leases: AtomicUsize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MemorySnapshot {
    pub live_strips: usize,
    pub peak_strips: usize,
    pub interface_buffers: usize,
    pub interface_bytes: usize,
    pub peak_interface_bytes: usize,
    pub leases: usize,
}

/// A strip temporary counted as live until dropped.
#[must_use]
#[derive(Debug)]
pub struct StripLease<'a>(&'a MemoryLedger);

impl Drop for StripLease<'_> {
    fn drop(&mut self) {
        self.0.live_strips.fetch_sub(1, Ordering::Relaxed);
    }
}

impl MemoryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lease_strip(&self) -> StripLease<'_> {
        let live = self.live_strips.fetch_add(1, Ordering::Relaxed) + 1;
        self.peak_strips.fetch_max(live, Ordering::Relaxed);
        self.leases.fetch_add(1, Ordering::Relaxed);
        StripLease(self)
    }

    pub(crate) fn add_interfaces(&self, buffers: usize, bytes: usize) {
        self.interface_buffers.fetch_add(buffers, Ordering::Relaxed);
        let live = self.interface_bytes.fetch_add(bytes, Ordering::Relaxed) + bytes;
        self.peak_interface_bytes.fetch_max(live, Ordering::Relaxed);
    }

    pub(crate) fn remove_interfaces(&self, buffers: usize, bytes: usize) {
        self.interface_buffers.fetch_sub(buffers, Ordering::Relaxed);
        self.interface_bytes.fetch_sub(bytes, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> MemorySnapshot {
        MemorySnapshot {
            live_strips: self.live_strips.load(Ordering::Relaxed),
            peak_strips: self.peak_strips.load(Ordering::Relaxed),
            interface_buffers: self.interface_buffers.load(Ordering::Relaxed),
            interface_bytes: self.interface_bytes.load(Ordering::Relaxed),
            peak_interface_bytes: self.peak_interface_bytes.load(Ordering::Relaxed),
            leases: self.leases.load(Ordering::Relaxed),
        }
    }
}
