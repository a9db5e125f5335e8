"""Request and response models for the HTTP service.

Each model mirrors a core dataclass one-to-one and converts through the
core constructors, so domain validation lives in exactly one place and a
core ValueError surfaces as a 400 response.
"""

from __future__ import annotations

from pydantic import BaseModel

from wificolo import classifier, dutycycle, privacy, scanlog, synth


class ApObservationIn(BaseModel):
    bssid: str
    rssi_dbm: float


class ScanIn(BaseModel):
    device_id: str
    timestamp_s: float
    observations: list[ApObservationIn]
    ground_truth_distance_ft: float | None = None

    def to_scan(self) -> scanlog.Scan:
        return scanlog.Scan.from_observations(
            self.device_id,
            self.timestamp_s,
            [scanlog.ApObservation(o.bssid, o.rssi_dbm) for o in self.observations],
            self.ground_truth_distance_ft,
        )

    @classmethod
    def from_scan(cls, scan: scanlog.Scan) -> "ScanIn":
        return cls(
            device_id=scan.device_id,
            timestamp_s=scan.timestamp_s,
            observations=[
                ApObservationIn(bssid=o.bssid, rssi_dbm=o.rssi_dbm)
                for o in scan.observations.values()
            ],
            ground_truth_distance_ft=scan.ground_truth_distance_ft,
        )


class ScanLogIn(BaseModel):
    scans: list[ScanIn]

    def to_log(self) -> scanlog.ScanLog:
        return scanlog.ScanLog.from_scans([s.to_scan() for s in self.scans], source="api")


class FeatureVectorOut(BaseModel):
    jaccard: float
    pearson: float
    das: float
    shared_ap_count: int
    union_ap_count: int

    @classmethod
    def from_core(cls, fv) -> "FeatureVectorOut":
        return cls(
            jaccard=fv.jaccard,
            pearson=fv.pearson,
            das=fv.das,
            shared_ap_count=fv.shared_ap_count,
            union_ap_count=fv.union_ap_count,
        )


class FeaturesRequest(BaseModel):
    scan_a: ScanIn
    scan_b: ScanIn


class ThresholdProfileIn(BaseModel):
    k_ft: float
    avg_jaccard: float
    avg_pearson: float
    avg_das: float

    def to_profile(self) -> classifier.ThresholdProfile:
        return classifier.ThresholdProfile(
            self.k_ft, self.avg_jaccard, self.avg_pearson, self.avg_das
        )


class ClassifyRequest(BaseModel):
    scan_a: ScanIn
    scan_b: ScanIn
    profile: ThresholdProfileIn


class ClassifyResponse(BaseModel):
    colocated: bool
    features: FeatureVectorOut


class CurvePointOut(BaseModel):
    distance_ft: float
    jaccard: float
    pearson: float
    das: float


class CalibrateRequest(BaseModel):
    log: ScanLogIn


class CalibrateResponse(BaseModel):
    subject_count: int
    points: list[CurvePointOut]

    @classmethod
    def from_curve(cls, curve: classifier.CalibrationCurve) -> "CalibrateResponse":
        return cls(
            subject_count=curve.subject_count,
            points=[
                CurvePointOut(
                    distance_ft=d,
                    jaccard=curve.points[d].jaccard,
                    pearson=curve.points[d].pearson,
                    das=curve.points[d].das,
                )
                for d in curve.distances()
            ],
        )


class EvalReportOut(BaseModel):
    k_ft: float
    true_pos: int
    false_pos: int
    true_neg: int
    false_neg: int
    precision: float
    recall: float
    f_score: float

    @classmethod
    def from_core(cls, r: classifier.EvalReport) -> "EvalReportOut":
        return cls(
            k_ft=r.k_ft,
            true_pos=r.true_pos,
            false_pos=r.false_pos,
            true_neg=r.true_neg,
            false_neg=r.false_neg,
            precision=r.precision,
            recall=r.recall,
            f_score=r.f_score,
        )


class SweepRequest(BaseModel):
    log: ScanLogIn
    ks: list[float]
    # omitted curve means: calibrate on the same log first
    curve: list[CurvePointOut] | None = None

    def to_curve(self) -> classifier.CalibrationCurve:
        if self.curve is None:
            return classifier.calibrate(self.log.to_log())
        points = {
            p.distance_ft: classifier.CurvePoint(p.jaccard, p.pearson, p.das)
            for p in self.curve
        }
        return classifier.CalibrationCurve(
            points=points, subject_count=0, scans_per_distance={}
        )


class SweepResponse(BaseModel):
    reports: list[EvalReportOut]


class PathLossIn(BaseModel):
    rssi0_dbm: float = -40.0
    d0_m: float = 1.0
    exponent_n: float = 2.5
    noise_sigma_db: float = 4.0
    sensitivity_dbm: float = -90.0

    def to_model(self) -> synth.PathLossModel:
        return synth.PathLossModel(
            rssi0_dbm=self.rssi0_dbm,
            d0_m=self.d0_m,
            exponent_n=self.exponent_n,
            noise_sigma_db=self.noise_sigma_db,
            sensitivity_dbm=self.sensitivity_dbm,
        )


class DutyCycleConfigIn(BaseModel):
    period_s: float = 60.0
    hotspot_fraction: float = 0.25
    scan_duration_s: float | None = None
    phase_policy: str = dutycycle.PHASE_RANDOMIZED
    phase_offset_s: float = 0.0

    def to_config(self) -> dutycycle.DutyCycleConfig:
        return dutycycle.DutyCycleConfig(
            period_s=self.period_s,
            hotspot_fraction=self.hotspot_fraction,
            scan_duration_s=self.scan_duration_s,
            phase_policy=self.phase_policy,
            phase_offset_s=self.phase_offset_s,
        )


class SimDeviceIn(BaseModel):
    device_id: str
    x_m: float
    y_m: float
    config: DutyCycleConfigIn = DutyCycleConfigIn()
    rng_seed: int = 0

    def to_device(self) -> dutycycle.SimDevice:
        return dutycycle.SimDevice(
            device_id=self.device_id,
            position=(self.x_m, self.y_m),
            config=self.config.to_config(),
            rng_seed=self.rng_seed,
        )


class SimulateRequest(BaseModel):
    devices: list[SimDeviceIn]
    radio: PathLossIn = PathLossIn()
    duration_s: float
    master_seed: int = 0


class EncounterOut(BaseModel):
    scanner_id: str
    hotspot_id: str
    time_s: float
    rssi_dbm: float


class SimulateResponse(BaseModel):
    encounters: list[EncounterOut]


class SynthExperimentRequest(BaseModel):
    subjects: int
    max_distance_ft: int = 25
    step_ft: int = 1
    seed: int = 0
    ambient_aps: int = 64
    faint_ambient_aps: int = 8
    cluster_min: int = 10
    cluster_max: int = 30
    home_spacing_m: float = 25.0
    path_loss: PathLossIn = PathLossIn()


class ScanLogOut(BaseModel):
    scans: list[ScanIn]

    @classmethod
    def from_log(cls, log: scanlog.ScanLog) -> "ScanLogOut":
        return cls(scans=[ScanIn.from_scan(s) for s in log.scans])


class PrivacyRequest(BaseModel):
    scan: ScanIn
    dictionary_size: int = privacy.DEFAULT_DICTIONARY_SIZE
    avg_neighbors: int = privacy.DEFAULT_AVG_NEIGHBORS
    guess_rate: float = privacy.DEFAULT_GUESS_RATE


class PrivacyReportOut(BaseModel):
    num_aps: int
    naive_entropy_bits: float
    effective_entropy_bits: float
    dictionary_size: int
    brute_force_seconds: float
    assumptions: str

    @classmethod
    def from_core(cls, r: privacy.PrivacyReport) -> "PrivacyReportOut":
        return cls(
            num_aps=r.num_aps,
            naive_entropy_bits=r.naive_entropy_bits,
            effective_entropy_bits=r.effective_entropy_bits,
            dictionary_size=r.dictionary_size,
            brute_force_seconds=r.brute_force_seconds,
            assumptions=r.assumptions,
        )
