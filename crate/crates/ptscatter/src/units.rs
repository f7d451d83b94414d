//! Unit system and physical constants.
//!
//! All internal computation uses electron-volts for energies and nanometres
//! for lengths, which keeps wavenumbers O(1) nm⁻¹ and phase products k·L
//! comfortably inside double precision for device-scale slabs. Lengths are
//! accepted in micrometres at the public interface and converted here.

/// ħ²/(2mₑ) in eV·nm² (CODATA). A free electron with kinetic energy E (eV)
/// has wavenumber k = √(E / HBAR2_OVER_2ME) in nm⁻¹.
pub const HBAR2_OVER_2ME: f64 = 0.0380998;

/// Nanometres per micrometre.
pub const NM_PER_UM: f64 = 1.0e3;

/// Convert a length given in micrometres to nanometres.
#[inline]
pub fn um_to_nm(um: f64) -> f64 {
    um * NM_PER_UM
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_electron_wavenumber_at_one_ev() {
        // k(1 eV, m = m_e) ≈ 5.1232 nm⁻¹.
        let k = (1.0f64 / HBAR2_OVER_2ME).sqrt();
        assert!((k - 5.1232).abs() < 5e-4, "k = {k}");
    }

    #[test]
    fn micron_conversion() {
        assert_eq!(um_to_nm(0.5), 500.0);
    }
}
