package fixture;

public class F1 {
    int m0(int a, int b) {
        return a;
    }
    int m1(int a, int b) {
        a = b > 3 ? a : b; // pick
        a += 1;
        a += 1;
        for (int i = 0; i < b; i++) { a += i; }
        return a;
    }
}
