//! The linear, unidirectional communication bus: a fixed number of one-bit
//! channels that senders write to with XOR and that deliver to the receiver
//! exactly once.
//!
//! Unidirectionality is structural: nothing here lets a sender read a
//! channel's current value, and the upload log proves each sender wrote at
//! most one bit per channel.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// One upload event: (sender, channel, bit), in arrival order.
pub type Upload = (usize, usize, bool);

/// An m-channel XOR bus for n senders. Channels start at zero, accept one
/// upload per (sender, channel) pair, and seal on delivery.
#[derive(Debug, Clone)]
pub struct ChannelBus {
    n_senders: usize,
    n_channels: usize,
    values: Vec<bool>,
    used: Vec<bool>,
    uploads: Vec<Upload>,
    delivered: Option<Vec<bool>>,
}

impl ChannelBus {
    pub fn new(n_senders: usize, n_channels: usize) -> Result<Self> {
        if n_senders == 0 || n_channels == 0 {
            return Err(Error::InvalidInput(format!(
                "bus needs at least one sender and one channel, got ({n_senders}, {n_channels})"
            )));
        }
        Ok(ChannelBus {
            n_senders,
            n_channels,
            values: vec![false; n_channels],
            used: vec![false; n_senders * n_channels],
            uploads: Vec::new(),
            delivered: None,
        })
    }

    pub fn sender_count(&self) -> usize {
        self.n_senders
    }

    pub fn channel_count(&self) -> usize {
        self.n_channels
    }

    pub fn is_sealed(&self) -> bool {
        self.delivered.is_some()
    }

    /// Upload order so far; skipping a channel is the same as uploading 0.
    pub fn uploads(&self) -> &[Upload] {
        &self.uploads
    }

    /// Delivered bits, present once the bus is sealed.
    pub fn delivered(&self) -> Option<&[bool]> {
        self.delivered.as_deref()
    }

    /// XOR `bit` into `channel` on behalf of `sender`. Each (sender, channel)
    /// pair may be used once; the sender learns nothing back.
    pub fn upload(&mut self, sender: usize, channel: usize, bit: bool) -> Result<()> {
        if sender >= self.n_senders {
            return Err(Error::InvalidInput(format!(
                "sender {sender} out of range (N={})",
                self.n_senders
            )));
        }
        if channel >= self.n_channels {
            return Err(Error::InvalidInput(format!(
                "channel {channel} out of range (m={})",
                self.n_channels
            )));
        }
        if self.is_sealed() {
            return Err(Error::ProtocolViolation(
                "upload after the bus was delivered".into(),
            ));
        }
        let slot = sender * self.n_channels + channel;
        if self.used[slot] {
            return Err(Error::ProtocolViolation(format!(
                "sender {sender} already uploaded to channel {channel}"
            )));
        }
        self.used[slot] = true;
        self.values[channel] ^= bit;
        self.uploads.push((sender, channel, bit));
        Ok(())
    }

    /// Hand the channel values to the receiver and seal the bus.
    pub fn deliver(&mut self) -> Result<Vec<bool>> {
        if self.is_sealed() {
            return Err(Error::ProtocolViolation("bus already delivered".into()));
        }
        self.delivered = Some(self.values.clone());
        Ok(self.values.clone())
    }

    /// Structured-text record: N, m, ordered uploads, delivered bits.
    pub fn transcript_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "N={}", self.n_senders);
        let _ = writeln!(out, "m={}", self.n_channels);
        for &(sender, channel, bit) in &self.uploads {
            let _ = writeln!(out, "upload={sender},{channel},{}", u8::from(bit));
        }
        if let Some(bits) = &self.delivered {
            let _ = writeln!(out, "delivered={}", bit_string(bits));
        }
        out
    }
}

/// Bits rendered as a 0/1 string ordered by index.
pub fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Parse a 0/1 string ordered by index.
pub fn parse_bit_string(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidInput(format!(
                "bit strings may contain only 0 and 1, found {other:?}"
            ))),
        })
        .collect()
}
