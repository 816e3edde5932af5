use super::{predict_standardized, LstmParams};
use crate::error::{Error, Result};
use crate::numkit::Standardizer;
use crate::simdata::PriceSeries;

/// `window` standardized prices for days `target_day - window ..= target_day - 1`
/// and the standardized price on `target_day`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedSample {
    pub input: Vec<f64>,
    pub target: f64,
    pub company_id: u32,
    pub target_day: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSet {
    pub samples: Vec<WindowedSample>,
    /// The range held no complete window.
    pub short_range: bool,
}

/// Stride-1 windows lying entirely inside the inclusive 1-based day range.
pub fn make_windows(
    series: &PriceSeries,
    first_day: usize,
    last_day: usize,
    standardizer: &Standardizer,
    window: usize,
) -> Result<WindowSet> {
    if window == 0 {
        return Err(Error::InvalidParameter("window must be >= 1".into()));
    }
    if first_day == 0 || last_day > series.len() || first_day > last_day {
        return Err(Error::InvalidParameter(format!(
            "day range [{first_day}, {last_day}] is not inside series of length {}",
            series.len()
        )));
    }
    let samples: Vec<WindowedSample> = (first_day + window..=last_day)
        .map(|target_day| WindowedSample {
            input: series
                .days(target_day - window, target_day - 1)
                .iter()
                .map(|&p| standardizer.apply(p))
                .collect(),
            target: standardizer.apply(series.on_day(target_day)),
            company_id: series.company_id,
            target_day,
        })
        .collect();
    Ok(WindowSet {
        short_range: samples.is_empty(),
        samples,
    })
}

/// Next-day price from the last `window` observed prices.
pub fn predict_next(params: &LstmParams, last_prices: &[f64], standardizer: &Standardizer) -> Result<f64> {
    let z: Vec<f64> = last_prices.iter().map(|&p| standardizer.apply(p)).collect();
    Ok(standardizer.invert(predict_standardized(params, &z)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lstm::init_params;
    use crate::numkit::RngStream;

    fn ramp(n: usize) -> PriceSeries {
        PriceSeries {
            company_id: 3,
            prices: (1..=n).map(|d| 100.0 + d as f64).collect(),
        }
    }

    #[test]
    fn counts() {
        let s = ramp(100);
        let st = Standardizer::fit(&s.prices[..80]).unwrap();
        let w = make_windows(&s, 1, 80, &st, 10).unwrap();
        assert_eq!(w.samples.len(), 70);
        assert_eq!(w.samples[0].target_day, 11);
        assert_eq!(w.samples.last().unwrap().target_day, 80);
        assert!(!w.short_range);

        assert_eq!(make_windows(&s, 1, 11, &st, 10).unwrap().samples.len(), 1);
        let empty = make_windows(&s, 1, 10, &st, 10).unwrap();
        assert!(empty.samples.is_empty() && empty.short_range);
    }

    #[test]
    fn window_contents() {
        let s = ramp(30);
        let st = Standardizer::new(0.0, 1.0).unwrap();
        let w = make_windows(&s, 5, 20, &st, 3).unwrap();
        let first = &w.samples[0];
        assert_eq!(first.target_day, 8);
        assert_eq!(first.input, vec![105.0, 106.0, 107.0]);
        assert_eq!(first.target, 108.0);
    }

    #[test]
    fn out_of_range() {
        let s = ramp(20);
        let st = Standardizer::new(0.0, 1.0).unwrap();
        assert!(make_windows(&s, 1, 21, &st, 3).is_err());
        assert!(make_windows(&s, 0, 10, &st, 3).is_err());
    }

    #[test]
    fn zero_network_returns_the_mean() {
        let st = Standardizer::new(42.0, 3.0).unwrap();
        let p = LstmParams::zeros(4, 1);
        assert_eq!(predict_next(&p, &[40.0; 10], &st).unwrap(), 42.0);
    }

    #[test]
    fn predict_next_is_inverted_forward() {
        let st = Standardizer::new(100.0, 2.5).unwrap();
        let p = init_params(4, 1, &mut RngStream::new(3, 3)).unwrap();
        let prices: Vec<f64> = (0..10).map(|k| 99.0 + 0.3 * k as f64).collect();
        let z: Vec<f64> = prices.iter().map(|&x| st.apply(x)).collect();
        let direct = st.invert(predict_standardized(&p, &z).unwrap());
        assert_eq!(predict_next(&p, &prices, &st).unwrap(), direct);
    }
}
