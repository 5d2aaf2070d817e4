import datetime
import json
import logging

from sqlalchemy import Column, DateTime, Float, ForeignKey, Integer, String, Text, create_engine
from sqlalchemy.orm import declarative_base, relationship, sessionmaker

from config.settings import DB_PATH

logger = logging.getLogger(__name__)

# Create the base class for declarative models
Base = declarative_base()


def _utcnow():
    return datetime.datetime.now(datetime.timezone.utc).replace(tzinfo=None)


# One verification run
class Run(Base):
    __tablename__ = 'runs'

    id = Column(Integer, primary_key=True)
    preset = Column(String(50))
    order = Column(String(20))
    suites = Column(Text)  # comma separated
    config = Column(Text)  # JSON
    passed = Column(Integer, default=0)
    failed = Column(Integer, default=0)
    skipped = Column(Integer, default=0)
    created_at = Column(DateTime, default=_utcnow)

    results = relationship('CheckResult', back_populates='run', cascade='all, delete-orphan')

    @property
    def ok(self):
        return self.failed == 0


# One report of a run
class CheckResult(Base):
    __tablename__ = 'check_results'

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey('runs.id'))
    suite = Column(String(50))
    check = Column(String(100))
    status = Column(String(10))
    order = Column(String(20))
    elapsed_ms = Column(Float)
    residual_sample = Column(Text)  # JSON list
    detail = Column(Text)  # JSON

    run = relationship('Run', back_populates='results')

    def to_dict(self):
        return {
            'suite': self.suite,
            'check': self.check,
            'status': self.status,
            'order': self.order,
            'elapsed_ms': self.elapsed_ms,
            'residual_sample': json.loads(self.residual_sample or '[]'),
            'detail': json.loads(self.detail or '{}'),
        }


class DatabaseManager:
    def __init__(self, db_path=DB_PATH):
        self.engine = create_engine(f'sqlite:///{db_path}')
        Base.metadata.create_all(self.engine)
        Session = sessionmaker(bind=self.engine)
        self.session = Session()

    def save_run(self, config, reports):
        """Store a run and its reports; returns the run id"""
        config = dict(config or {})
        counts = {'pass': 0, 'fail': 0, 'skip': 0}
        for report in reports:
            counts[report.status] += 1
        run = Run(
            preset=config.get('preset'),
            order=str(config.get('order', '')),
            suites=','.join(config.get('suites', [])),
            config=json.dumps(config, sort_keys=True, default=str),
            passed=counts['pass'],
            failed=counts['fail'],
            skipped=counts['skip'],
        )
        for report in reports:
            data = report.to_dict()
            run.results.append(
                CheckResult(
                    suite=data['suite'],
                    check=data['check'],
                    status=data['status'],
                    order=data['order'],
                    elapsed_ms=data['elapsed_ms'],
                    residual_sample=json.dumps(data['residual_sample']),
                    detail=json.dumps(data['detail'], sort_keys=True, default=str),
                )
            )
        self.session.add(run)
        self.session.commit()
        logger.info("saved run %d with %d reports", run.id, len(reports))
        return run.id

    def get_run(self, run_id):
        return self.session.query(Run).filter(Run.id == run_id).first()

    def get_recent_runs(self, limit=10):
        return self.session.query(Run).order_by(Run.id.desc()).limit(limit).all()

    def get_run_results(self, run_id):
        return (
            self.session.query(CheckResult)
            .filter(CheckResult.run_id == run_id)
            .order_by(CheckResult.suite, CheckResult.check)
            .all()
        )

    def close(self):
        self.session.close()
        self.engine.dispose()
