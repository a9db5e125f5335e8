"""FastAPI application exposing calibration, classification, simulation,
synthesis, and privacy analysis over HTTP.

The service is stateless: every request carries its full inputs and every
response is a pure function of them, seeds included.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from wificolo import __version__, classifier, dutycycle, features, privacy, synth
from wificolo.service import schemas


def create_app() -> FastAPI:
    app = FastAPI(title="wificolo", version=__version__)

    @app.exception_handler(ValueError)
    async def on_value_error(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/features", response_model=schemas.FeatureVectorOut)
    def compute_features(req: schemas.FeaturesRequest) -> schemas.FeatureVectorOut:
        fv = features.feature_vector(req.scan_a.to_scan(), req.scan_b.to_scan())
        return schemas.FeatureVectorOut.from_core(fv)

    @app.post("/classify", response_model=schemas.ClassifyResponse)
    def classify_pair(req: schemas.ClassifyRequest) -> schemas.ClassifyResponse:
        fv = features.feature_vector(req.scan_a.to_scan(), req.scan_b.to_scan())
        return schemas.ClassifyResponse(
            colocated=classifier.classify(fv, req.profile.to_profile()),
            features=schemas.FeatureVectorOut.from_core(fv),
        )

    @app.post("/calibrate", response_model=schemas.CalibrateResponse)
    def calibrate(req: schemas.CalibrateRequest) -> schemas.CalibrateResponse:
        curve = classifier.calibrate(req.log.to_log())
        return schemas.CalibrateResponse.from_curve(curve)

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def sweep(req: schemas.SweepRequest) -> schemas.SweepResponse:
        reports = classifier.sweep_thresholds(req.log.to_log(), req.to_curve(), req.ks)
        return schemas.SweepResponse(
            reports=[schemas.EvalReportOut.from_core(r) for r in reports]
        )

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
        encounters = dutycycle.simulate(
            [d.to_device() for d in req.devices],
            req.radio.to_model(),
            req.duration_s,
            req.master_seed,
        )
        return schemas.SimulateResponse(
            encounters=[
                schemas.EncounterOut(
                    scanner_id=e.scanner_id,
                    hotspot_id=e.hotspot_id,
                    time_s=e.time_s,
                    rssi_dbm=e.rssi_dbm,
                )
                for e in encounters
            ]
        )

    @app.post("/synth/experiment", response_model=schemas.ScanLogOut)
    def synth_experiment(req: schemas.SynthExperimentRequest) -> schemas.ScanLogOut:
        scenario = synth.default_experiment_scenario(
            subjects=req.subjects,
            seed=req.seed,
            path_loss=req.path_loss.to_model(),
            ambient_aps=req.ambient_aps,
            faint_ambient_aps=req.faint_ambient_aps,
            cluster_min=req.cluster_min,
            cluster_max=req.cluster_max,
            home_spacing_m=req.home_spacing_m,
        )
        log = synth.gen_distance_experiment(
            scenario, req.subjects, req.max_distance_ft, req.step_ft
        )
        return schemas.ScanLogOut.from_log(log)

    @app.post("/privacy", response_model=schemas.PrivacyReportOut)
    def analyze(req: schemas.PrivacyRequest) -> schemas.PrivacyReportOut:
        report = privacy.analyze_scan(
            req.scan.to_scan(),
            dictionary_size=req.dictionary_size,
            avg_neighbors=req.avg_neighbors,
            guess_rate=req.guess_rate,
        )
        return schemas.PrivacyReportOut.from_core(report)

    return app


app = create_app()
