//! Engine throughput. `cargo bench` measures the rayon build on the global
//! pool and on a one-thread pool; `cargo bench --no-default-features`
//! measures the sequential fallback under the same names.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};

use catrace::alphabet::all_words;
use catrace::compile::{polytrace_to_trace, sft_polytracer, sft_polytracer_recipe, totalize, CompiledArtifact};
use catrace::trace::{trace_naive, trace_transducer};
use catrace::verify::{run_witnesses, sample_columns, DEFAULT_SEED};
use catrace::{Alphabet, CellularAutomaton, Sft};

const MODE: &str = if cfg!(feature = "parallel") { "parallel" } else { "sequential" };

fn rule110() -> CellularAutomaton {
    CellularAutomaton::from_fn(Alphabet::binary(), 1, 3, |w| (0x6e >> (w[0] * 4 + w[1] * 2 + w[2])) & 1).unwrap()
}

fn full_trace() -> CompiledArtifact {
    let full = Sft::full(Alphabet::binary());
    let g = totalize(&sft_polytracer(&full).unwrap()).unwrap();
    polytrace_to_trace(&g, &[1, 0], Some(sft_polytracer_recipe(&full))).unwrap()
}

#[cfg(feature = "parallel")]
type Pool = Option<rayon::ThreadPool>;
#[cfg(not(feature = "parallel"))]
type Pool = Option<()>;

fn on<R: Send>(pool: &Pool, f: impl FnOnce() -> R + Send) -> R {
    match pool {
        #[cfg(feature = "parallel")]
        Some(p) => p.install(f),
        _ => f(),
    }
}

fn workloads(c: &mut Criterion, mode: &str, pool: &Pool) {
    let ca = rule110();
    let art = full_trace();
    let words = all_words(2, 6);
    let mut g = c.benchmark_group(mode);
    g.sample_size(10).measurement_time(Duration::from_secs(5));
    g.bench_function("naive rule110 depth 9", |b| b.iter(|| on(pool, || black_box(trace_naive(&ca, 9, 1).unwrap().len()))));
    g.bench_function("transducer rule110 depth 7", |b| {
        b.iter(|| on(pool, || black_box(trace_transducer(&ca, 7, 1).unwrap().len())))
    });
    g.bench_function("witnesses full trace length 6", |b| {
        b.iter(|| on(pool, || black_box(run_witnesses(&art, &words).passed())))
    });
    g.bench_function("sampling full trace 1000", |b| {
        b.iter(|| on(pool, || black_box(sample_columns(art.automaton(), 1000, 40, 12, DEFAULT_SEED, |c| c.len() == 12).passed())))
    });
    g.finish();
}

fn engines(c: &mut Criterion) {
    workloads(c, MODE, &None);
    #[cfg(feature = "parallel")]
    workloads(c, "parallel-1-thread", &Some(rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()));
}

criterion_group!(benches, engines);
criterion_main!(benches);
