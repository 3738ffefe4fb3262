//! Example networks shipped with the library.

/// Binary a, b, x with a common effect c whose pairwise product synergies for
/// `C` are all negative per instantiation of the third parent, yet the
/// intercausal influence of a on b given `C` turns positive for intermediate
/// `Pr(X)`.
pub const SIGN_FLIP: &str = include_str!("../networks/sign_flip.json");

/// Leaky Noisy-OR gate c over binary a, b, x, with an evidence child d.
pub const NOISY_OR: &str = include_str!("../networks/noisy_or.json");
