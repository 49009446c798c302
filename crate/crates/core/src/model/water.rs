//! Subcooled light-water properties at PWR operating pressure.
//!
//! Table values at 15.51 MPa from IAPWS-IF97 region 1 (density, isobaric heat
//! capacity), IAPWS 2008 viscosity and the IAPWS 2011 conductivity background
//! term. Saturation at this pressure is 618.0 K; the 620-630 K rows are the
//! region 1 equation continued into the metastable liquid, which keeps the
//! single-phase channel model defined slightly past saturation.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RodError};

/// Pressure the table was evaluated at [Pa].
pub const TABLE_PRESSURE: f64 = 15.51e6;
pub const TABLE_T_MIN: f64 = 560.0;
pub const TABLE_T_MAX: f64 = 630.0;
const TABLE_DT: f64 = 5.0;

/// Columns: T [K], rho [kg/m^3], c_p [J/kg K], mu [Pa s], k [W/m K], Pr [-].
const TABLE: [[f64; 6]; 15] = [
    [
        560.0,
        752.0690081219656,
        5185.050992950392,
        9.374559354426691e-05,
        0.5790617579222389,
        0.8394194163944414,
    ],
    [
        565.0,
        742.7076631748683,
        5278.4416495474925,
        9.175642577800374e-05,
        0.5714456969185138,
        0.8475537431674668,
    ],
    [
        570.0,
        732.9300589428178,
        5384.016123963605,
        8.977798926560154e-05,
        0.5634912403822941,
        0.8578059553420848,
    ],
    [
        575.0,
        722.6815121047706,
        5504.532931014003,
        8.780113893873767e-05,
        0.5551675219606431,
        0.8705557179605325,
    ],
    [
        580.0,
        711.8936845305509,
        5643.710694223812,
        8.581547867482908e-05,
        0.5464349596565821,
        0.8863227474161747,
    ],
    [
        585.0,
        700.4796629379665,
        5806.680194667949,
        8.380881642057646e-05,
        0.5372421312105683,
        0.9058317771008615,
    ],
    [
        590.0,
        688.326818670361,
        6000.712029685278,
        8.176639796899607e-05,
        0.5275212739708011,
        0.9301171955081133,
    ],
    [
        595.0,
        675.2860752272078,
        6236.477464304889,
        7.966977868735826e-05,
        0.5171815338867,
        0.960704794766929,
    ],
    [
        600.0,
        661.1541746485436,
        6530.546268365404,
        7.749493369270136e-05,
        0.5060976488618822,
        0.9999735252321028,
    ],
    [
        605.0,
        645.6387015380238,
        6911.286500676509,
        7.520832833261403e-05,
        0.4940869778661483,
        1.0520137701027525,
    ],
    [
        610.0,
        628.274058187894,
        7435.059247994917,
        7.275701421914295e-05,
        0.4808532353237558,
        1.124985071718018,
    ],
    [
        615.0,
        608.194796741004,
        8234.42832900936,
        7.00417669940795e-05,
        0.4658352697089553,
        1.2381070044573173,
    ],
    [
        620.0,
        583.5191344524555,
        9665.0457173694,
        6.684691485147451e-05,
        0.44780343856464216,
        1.4427725034347558,
    ],
    [
        625.0,
        549.8224645316665,
        12749.904188137069,
        6.268224480017444e-05,
        0.423873868353738,
        1.8854491280708583,
    ],
    [
        630.0,
        497.3132266814656,
        20497.190533325953,
        5.655498724254768e-05,
        0.38753287312482837,
        2.9912774618913995,
    ],
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaterProps {
    pub density: f64,
    pub specific_heat: f64,
    pub viscosity: f64,
    pub conductivity: f64,
    pub prandtl: f64,
}

impl WaterProps {
    fn from_row(row: &[f64; 6]) -> Self {
        Self {
            density: row[1],
            specific_heat: row[2],
            viscosity: row[3],
            conductivity: row[4],
            prandtl: row[5],
        }
    }
}

/// Interpolated water properties. The table is pressure-independent; `p` only
/// has to be positive.
pub fn water_properties(t: f64, p: f64) -> Result<WaterProps> {
    if !(p > 0.0) {
        return Err(RodError::domain(format!("pressure {p} Pa must be positive")));
    }
    if !(TABLE_T_MIN..=TABLE_T_MAX).contains(&t) {
        return Err(RodError::domain(format!(
            "water temperature {t} K outside table [{TABLE_T_MIN}, {TABLE_T_MAX}]"
        )));
    }
    let pos = (t - TABLE_T_MIN) / TABLE_DT;
    let i = (pos.floor() as usize).min(TABLE.len() - 2);
    let frac = pos - i as f64;
    if frac == 0.0 {
        return Ok(WaterProps::from_row(&TABLE[i]));
    }
    if frac == 1.0 {
        return Ok(WaterProps::from_row(&TABLE[i + 1]));
    }
    let (lo, hi) = (&TABLE[i], &TABLE[i + 1]);
    let lerp = |c: usize| lo[c] + frac * (hi[c] - lo[c]);
    let (density, specific_heat, viscosity, conductivity) = (lerp(1), lerp(2), lerp(3), lerp(4));
    Ok(WaterProps {
        density,
        specific_heat,
        viscosity,
        conductivity,
        prandtl: viscosity * specific_heat / conductivity,
    })
}

/// Table node temperatures, for tests and diagnostics.
pub fn table_temperatures() -> impl Iterator<Item = f64> {
    TABLE.iter().map(|r| r[0])
}
