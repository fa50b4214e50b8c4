use matconf::matrix_csv::{
    read_matrix, read_matrix_path, write_matrix, write_matrix_path, MatrixData,
};
use matconf_core::simgen::{mask_mcar, sample_instance, Graphon, GraphonSpec};
use matconf_core::{fill_missing, Square};

#[test]
fn generated_instances_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for g in Graphon::ALL {
        let inst = sample_instance(&GraphonSpec::new(g, 25, 0.8, 3)).unwrap();
        let path = dir.path().join(format!("{}.csv", g.name()));
        let data = MatrixData::from_square(&inst.complete);
        write_matrix_path(&data, &path).unwrap();
        let back = read_matrix_path(&path).unwrap();
        assert_eq!(back, data);
    }
}

#[test]
fn masked_file_gives_the_same_observation() {
    let n = 15;
    let inst = sample_instance(&GraphonSpec::new(Graphon::F2, n, 0.2, 8)).unwrap();
    let mask = mask_mcar(n, 20, 1).unwrap();
    let direct = inst.observe(&mask).unwrap();
    let data = MatrixData::from_square_masked(&inst.complete, |i, j| mask.get(i, j));
    let mut buf = Vec::new();
    write_matrix(&data, &mut buf).unwrap();
    assert_eq!(String::from_utf8_lossy(&buf).matches("NA").count(), 40);
    let (obs, perm) = read_matrix(buf.as_slice())
        .unwrap()
        .to_observed(inst.bound, n, n - 1)
        .unwrap();
    assert!(perm.is_identity());
    assert_eq!(obs, direct);
    let zero = Square::zeros(n + 1);
    assert_eq!(
        fill_missing(&obs, &zero).unwrap(),
        fill_missing(&direct, &zero).unwrap()
    );
}

#[test]
fn relabelled_observation_moves_the_entry() {
    let m = Square::from_fn(5, |i, j| (i + j) as f64 / 10.0);
    let data = MatrixData::from_square_masked(&m, |i, j| (i, j) == (0, 3) || (i, j) == (3, 0));
    let (obs, perm) = data.to_observed(1.0, 1, 2).unwrap();
    assert_eq!(obs.target(), (4, 3));
    assert_eq!((perm.apply(1), perm.apply(2)), (4, 3));
    let (a, b) = (perm.apply(0), perm.apply(3));
    assert!(obs.mask().get(a, b));
    for i in 0..5 {
        for j in 0..5 {
            let moved = obs.value(perm.apply(i), perm.apply(j));
            let pair = |x: usize, y: usize| (i, j) == (x, y) || (i, j) == (y, x);
            if pair(1, 2) || pair(0, 3) {
                assert_eq!(moved, None);
            } else {
                assert_eq!(moved, Some(m.get(i, j)));
            }
        }
    }
}
