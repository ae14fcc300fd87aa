use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unital::cubics::{build_extremal, intersect_count_arrangement, intersect_count_enum};
use unital::hermitian::DEFAULT_BUDGET;
use unital::search::{MonomialTable, VarietyBitset};
use unital::{Elem, FieldCtx, HermitianForm};

fn field_mul(c: &mut Criterion) {
    let f = FieldCtx::new(13).unwrap();
    let elems: Vec<Elem> = f.elements().collect();
    c.bench_function("field mul, all pairs of F_169", |b| {
        b.iter(|| {
            let mut acc = Elem::ONE;
            for &x in &elems {
                for &y in &elems {
                    acc = f.add(acc, f.mul(x, y));
                }
            }
            black_box(acc)
        })
    });
}

fn point_count(c: &mut Criterion) {
    let f = FieldCtx::new(3).unwrap();
    let form = HermitianForm::standard(4);
    c.bench_function("count_points_enum U_4(F_9)", |b| b.iter(|| form.count_points_enum(&f, DEFAULT_BUDGET).unwrap()));
}

fn triple_counts(c: &mut Criterion) {
    let f = FieldCtx::new(3).unwrap();
    let form = HermitianForm::standard(4);
    let arr = build_extremal(&f, &form, u64::MAX).unwrap();
    let cubic = arr.to_hypersurface(&f);
    c.bench_function("triple by section types (4,3)", |b| b.iter(|| intersect_count_arrangement(&f, &arr, &form).unwrap()));
    c.bench_function("triple by enumeration (4,3)", |b| b.iter(|| intersect_count_enum(&f, &cubic, &form, DEFAULT_BUDGET).unwrap()));
}

fn cubic_table(c: &mut Criterion) {
    let f = FieldCtx::new(5).unwrap();
    let form = HermitianForm::standard(4);
    let points: Vec<_> = VarietyBitset::new(&f, &form, DEFAULT_BUDGET).unwrap().points().collect();
    let table = MonomialTable::new(&f, 4, 3, &points);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let coeffs: Vec<Elem> = (0..table.basis.len()).map(|_| f.elem(rng.gen_range(0..f.order()))).collect();
    c.bench_function("random cubic zeros on U_4(F_25)", |b| b.iter(|| table.zeros(&f, black_box(&coeffs))));
}

criterion_group!(benches, field_mul, point_count, triple_counts, cubic_table);
criterion_main!(benches);
