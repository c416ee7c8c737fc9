import pytest
from httpx import ASGITransport, AsyncClient

from src.api import app

BASE_URL = "http://test"


def client() -> AsyncClient:
    return AsyncClient(transport=ASGITransport(app=app), base_url=BASE_URL)


@pytest.mark.asyncio
async def test_health_endpoint():
    """Test the health check endpoint"""
    async with client() as c:
        response = await c.get("/health")

        assert response.status_code == 200
        data = response.json()

        assert data["status"] == "healthy"
        assert "timestamp" in data
        assert data["service"] == "Fractal Interior API"

        print("Health endpoint working")


@pytest.mark.asyncio
async def test_expand_endpoint():
    async with client() as c:
        response = await c.get("/api/expand", params={"x": "1/56", "length": 5})

        assert response.status_code == 200
        data = response.json()
        assert data["expansion"]["digits"] == ["1/7", "0/1", "0/1", "0/1", "0/1"]
        assert data["verification"]["ok"] is True
        assert "retrieved_at" in data


@pytest.mark.asyncio
async def test_fibre_endpoint():
    async with client() as c:
        response = await c.get("/api/fibre", params={"x": "1/448", "y": "1/2", "N": 2})

        assert response.status_code == 200
        data = response.json()
        assert data["verified"] is True
        assert data["assignment"][0]["digit"] == "1/112"

        # 3/4 = 0.11 in binary has too few zeros for A_2
        response = await c.get("/api/fibre", params={"x": "1/448", "y": "3/4", "N": 2})
        assert response.status_code == 400


@pytest.mark.asyncio
async def test_gap_endpoint():
    async with client() as c:
        response = await c.get("/api/gap", params={"a": "3/10", "b": "9/20", "m": 1})

        assert response.status_code == 200
        data = response.json()
        assert data["inner"] == {"lo": "29/80", "hi": "31/80"}
        assert len(data["transcript"]) == 4

        response = await c.get("/api/gap", params={"a": "0", "b": "1/1000", "m": 1})
        assert response.status_code == 409

        response = await c.get("/api/gap", params={"a": "x", "b": "1", "m": 1})
        assert response.status_code == 400


@pytest.mark.asyncio
async def test_witness_endpoint():
    """Test the witness endpoint with a small falsification run"""
    async with client() as c:
        params = {"i_lo": "3/10", "i_hi": "9/20", "j_lo": "1/2", "j_hi": "3/4", "samples": 500}
        response = await c.get("/api/witness", params=params)

        assert response.status_code == 200
        data = response.json()
        assert data["x"] == "19/48"
        assert data["verification"]["ok"] is True
        assert data["transcript"][-1].endswith("R ∩ K = ∅")

        response = await c.get("/api/witness", params={**params, "samples": 10**6})
        assert response.status_code == 400

        response = await c.get("/api/witness", params={**params, "j_lo": "1/3", "j_hi": "2/3"})
        assert response.status_code == 400


@pytest.mark.asyncio
async def test_measure_endpoint():
    async with client() as c:
        response = await c.get("/api/measure", params={"N": 400, "M": 1000})

        assert response.status_code == 200
        data = response.json()
        assert data["an_lower"] != "0/1"
        assert data["rho"] == "9801/10000"

        response = await c.get("/api/measure", params={"N": 400, "M": 10**6})
        assert response.status_code == 400


@pytest.mark.asyncio
async def test_cover_endpoint():
    async with client() as c:
        response = await c.get("/api/cover", params={"m": 1, "epsilon": "1"})

        assert response.status_code == 200
        data = response.json()
        assert data["count"] == 3
        apexes = [(t["v2"]["x"], t["v2"]["y"]) for t in data["triangles"]]
        assert apexes == [("0/1", "1/2"), ("1/2", "1/2"), ("0/1", "1/1")]

        response = await c.get("/api/cover", params={"m": 6, "epsilon": "1/16"})
        assert response.status_code == 422
