use rand::seq::index::sample;
use rand::Rng;

use super::rng::{stream, Stream};
use crate::ndn::{Component, Data, Interest, Name};
use crate::stats::AppKind;
use crate::time::SimTime;

pub const DISTINCT_PREFIX: &str = "veh";
pub const SHARED_PREFIX: &str = "shared";

/// Consumer installed on one vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsumerSpec {
    pub kind: AppKind,
    /// Interests per second, fixed for the whole run.
    pub rate: f64,
    /// `/veh/<id>` for distinct consumers, `/shared` for shared ones.
    pub prefix: Name,
}

/// Mutable per-app state: the distinct-prefix sequence counter.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AppState {
    pub next_seq: u64,
}

/// Name of the consumer's next interest.
///
/// Distinct consumers count up from 0. Shared consumers use
/// `floor(now * shared_rate)`, so every shared consumer asking at the same
/// instant asks for the same name.
pub fn consumer_next_name(spec: &ConsumerSpec, state: &mut AppState, now: SimTime, shared_rate: f64) -> Name {
    let seq = match spec.kind {
        AppKind::Shared => (now.as_secs_f64() * shared_rate).floor() as u64,
        _ => {
            let s = state.next_seq;
            state.next_seq += 1;
            s
        }
    };
    spec.prefix.clone().append_number(seq)
}

/// Prefixes the producer serves.
pub fn producer_prefixes() -> Vec<Name> {
    vec![
        Name::from_components(vec![Component::from(DISTINCT_PREFIX)]),
        Name::from_components(vec![Component::from(SHARED_PREFIX)]),
    ]
}

/// The producer answers any interest under a served prefix with a Data of
/// `payload_bytes`; anything else gets no answer.
pub fn producer_on_interest(interest: &Interest, prefixes: &[Name], payload_bytes: usize) -> Option<Data> {
    prefixes
        .iter()
        .any(|p| p.is_prefix_of(&interest.name) && p.len() < interest.name.len())
        .then(|| Data::new(interest.name.clone(), payload_bytes))
}

/// Draws each vehicle's consumer. Scenario 1 gives everybody a distinct
/// prefix; scenario 2 gives `ceil(n/2)` randomly chosen vehicles the shared
/// prefix. Rates are uniform in `[rate_min, rate_max]`.
pub fn assign_apps(vehicle_ids: &[u32], scenario: u8, seed: u64, rate_min: f64, rate_max: f64) -> Vec<ConsumerSpec> {
    let n = vehicle_ids.len();
    let mut shared = vec![false; n];
    if scenario == 2 {
        let mut rng = stream(seed, Stream::AppAssignment);
        for i in sample(&mut rng, n, n.div_ceil(2)).into_iter() {
            shared[i] = true;
        }
    }
    let mut rates = stream(seed, Stream::AppRates);
    vehicle_ids
        .iter()
        .zip(shared)
        .map(|(&id, is_shared)| {
            let rate = if rate_max > rate_min {
                rates.gen_range(rate_min..=rate_max)
            } else {
                rate_min
            };
            let (kind, prefix) = if is_shared {
                (AppKind::Shared, Name::from_components(vec![Component::from(SHARED_PREFIX)]))
            } else {
                (
                    AppKind::Distinct,
                    Name::from_components(vec![Component::from(DISTINCT_PREFIX), Component::from_number(id as u64)]),
                )
            };
            ConsumerSpec { kind, rate, prefix }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        s.parse().unwrap()
    }

    #[test]
    fn distinct_counter_is_zero_based() {
        let spec = &assign_apps(&[7], 1, 1, 50.0, 100.0)[0];
        let mut st = AppState::default();
        let names: Vec<Name> = (0..3)
            .map(|_| consumer_next_name(spec, &mut st, SimTime::ZERO, 75.0))
            .collect();
        assert_eq!(names[2], n("/veh/7/2"));
    }

    #[test]
    fn shared_name_follows_time() {
        let spec = ConsumerSpec {
            kind: AppKind::Shared,
            rate: 60.0,
            prefix: n("/shared"),
        };
        let mut a = AppState::default();
        let mut b = AppState { next_seq: 99 };
        let t = SimTime::from_secs_f64(1.0);
        assert_eq!(consumer_next_name(&spec, &mut a, t, 75.0), n("/shared/75"));
        assert_eq!(consumer_next_name(&spec, &mut a, t, 75.0), consumer_next_name(&spec, &mut b, t, 75.0));
    }

    #[test]
    fn producer_serves_its_prefixes_only() {
        let p = producer_prefixes();
        let d = producer_on_interest(&Interest::new(n("/veh/3/10"), 1), &p, 1024).unwrap();
        assert_eq!(d.name, n("/veh/3/10"));
        assert_eq!(d.payload_size, 1024);
        assert!(producer_on_interest(&Interest::new(n("/shared/75"), 1), &p, 1024).is_some());
        assert!(producer_on_interest(&Interest::new(n("/x/y"), 1), &p, 1024).is_none());
    }

    #[test]
    fn scenario_split() {
        let ids: Vec<u32> = (0..125).collect();
        let one = assign_apps(&ids, 1, 3, 50.0, 100.0);
        assert!(one.iter().all(|s| s.kind == AppKind::Distinct));
        let two = assign_apps(&ids, 2, 3, 50.0, 100.0);
        assert_eq!(two.iter().filter(|s| s.kind == AppKind::Shared).count(), 63);
        assert_eq!(two, assign_apps(&ids, 2, 3, 50.0, 100.0));
        assert!(two.iter().all(|s| (50.0..=100.0).contains(&s.rate)));
        // rates do not depend on the scenario
        let r1: Vec<f64> = one.iter().map(|s| s.rate).collect();
        let r2: Vec<f64> = two.iter().map(|s| s.rate).collect();
        assert_eq!(r1, r2);
    }
}
